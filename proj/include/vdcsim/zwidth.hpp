#pragma once

#include <string>
#include <vector>

#include "vdcsim/sim.hpp"

namespace vdcsim {

/// Sweep definition: which desired-inertia values to test on the wall axis
/// and how to search for the largest passive wall stiffness.
struct ZWidthParams {
  std::vector<double> m_d_values{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  double ke_min = 10000.0;
  double ke_max = 2.0e6;
  double ke_tolerance = 1000.0;
  int max_bounces = 2;
  double stability_budget = 0.1;
  bool parallel = true;
};

/// One grid point: the stiffness boundary found for a desired inertia, with
/// the boundary run's energy bookkeeping and the free-motion tracking error.
struct ZWidthPoint {
  double m_d = 0.0;
  double ke_max_passive = 0.0;
  double free_motion_rms = 0.0;
  double energy_net = 0.0;
  double energy_absorbed = 0.0;
  double energy_injected = 0.0;
  double energy_replay_gap = 0.0;
  double stability_integral = 0.0;
  int bounce_count = 0;
  bool converged = false;
};

struct ZWidthReport {
  std::vector<ZWidthPoint> points;
};

/// Classification used by the search: no divergence, bounce count within
/// bounds, the running contact energy never negative, and the integral of
/// the stability functional bounded below by -stability_budget (persistent
/// ringing drains that budget before the run loses contact or diverges).
bool run_is_passive(const RunSummary& summary, int max_bounces,
                    double stability_budget);

/// For each m_d value, set the wall-axis desired inertia, then bisect on the
/// wall stiffness between ke_min and ke_max for the largest passive value.
/// Points run independently (optionally in parallel); the report is ordered
/// by the input grid.
ZWidthReport run_zwidth_sweep(const ExperimentConfig& base,
                              const ZWidthParams& params);

void write_zwidth_csv(const ZWidthReport& report, const std::string& path);
void write_zwidth_json(const ZWidthReport& report, const std::string& path);

}  // namespace vdcsim
