#include "vdcsim/zwidth.hpp"

#include <cstdio>
#include <fstream>
#include <future>

#include <json.hpp>

namespace vdcsim {

bool run_is_passive(const RunSummary& summary, int max_bounces,
                    double stability_budget) {
  return !summary.diverged && summary.bounce_count <= max_bounces &&
         summary.min_running_energy >= -1e-12 &&
         summary.stability_integral >= -stability_budget;
}

namespace {

ExperimentConfig probe_config(const ExperimentConfig& base, double m_d,
                              double ke) {
  ExperimentConfig cfg = base;
  cfg.impedance.M_d(cfg.wall.axis, cfg.wall.axis) = m_d;
  cfg.wall.stiffness = ke;
  cfg.run.telemetry_path.clear();
  cfg.run.summary_path.clear();
  return cfg;
}

ZWidthPoint sweep_point(const ExperimentConfig& base, const ZWidthParams& p,
                        double m_d) {
  ZWidthPoint point;
  point.m_d = m_d;

  auto passive_at = [&](double ke) {
    const RunResult res = run_experiment(probe_config(base, m_d, ke));
    return run_is_passive(res.summary, p.max_bounces, p.stability_budget);
  };

  if (!passive_at(p.ke_min)) {
    point.converged = false;
    point.ke_max_passive = 0.0;
    return point;
  }

  double lo = p.ke_min;
  if (passive_at(p.ke_max)) {
    lo = p.ke_max;
  } else {
    double hi = p.ke_max;
    while (hi - lo > p.ke_tolerance) {
      const double mid = 0.5 * (lo + hi);
      if (passive_at(mid)) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
  }
  point.converged = true;
  point.ke_max_passive = lo;

  const RunResult boundary = run_experiment(probe_config(base, m_d, lo));
  const RunSummary& sum = boundary.summary;
  point.free_motion_rms = sum.free_motion_rms_error;
  point.energy_net = sum.energy_net;
  point.energy_absorbed = sum.energy_absorbed;
  point.energy_injected = sum.energy_injected;
  point.stability_integral = sum.stability_integral;
  point.bounce_count = sum.bounce_count;

  if (sum.first_contact_step >= 0) {
    const size_t first = static_cast<size_t>(sum.first_contact_step);
    std::vector<double> f(boundary.contact_force.begin() + first,
                          boundary.contact_force.end());
    std::vector<double> v(boundary.contact_velocity.begin() + first,
                          boundary.contact_velocity.end());
    const EnergyBreakdown replay = contact_energy(f, v, base.run.dt);
    point.energy_replay_gap = std::abs(replay.net - sum.energy_net);
  }
  return point;
}

}  // namespace

ZWidthReport run_zwidth_sweep(const ExperimentConfig& base,
                              const ZWidthParams& params) {
  if (params.m_d_values.empty()) {
    throw std::invalid_argument("run_zwidth_sweep: empty grid");
  }
  ZWidthReport report;
  report.points.resize(params.m_d_values.size());
  if (params.parallel) {
    std::vector<std::future<ZWidthPoint>> futures;
    futures.reserve(params.m_d_values.size());
    for (double m_d : params.m_d_values) {
      futures.push_back(std::async(std::launch::async, sweep_point,
                                   std::cref(base), std::cref(params), m_d));
    }
    for (size_t i = 0; i < futures.size(); ++i) {
      report.points[i] = futures[i].get();
    }
  } else {
    for (size_t i = 0; i < params.m_d_values.size(); ++i) {
      report.points[i] = sweep_point(base, params, params.m_d_values[i]);
    }
  }
  return report;
}

void write_zwidth_csv(const ZWidthReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("write_zwidth_csv: cannot open " + path);
  }
  out << "m_d,ke_max_passive,free_motion_rms,E_net,E_abs,E_inj,"
         "replay_gap,stability_integral,bounces,converged\n";
  char buf[32];
  for (const ZWidthPoint& p : report.points) {
    const double vals[] = {p.m_d,
                           p.ke_max_passive,
                           p.free_motion_rms,
                           p.energy_net,
                           p.energy_absorbed,
                           p.energy_injected,
                           p.energy_replay_gap,
                           p.stability_integral};
    for (double v : vals) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << buf << ',';
    }
    out << p.bounce_count << ',' << (p.converged ? 1 : 0) << "\n";
  }
}

void write_zwidth_json(const ZWidthReport& report, const std::string& path) {
  nlohmann::json j;
  j["points"] = nlohmann::json::array();
  for (const ZWidthPoint& p : report.points) {
    nlohmann::json e;
    e["m_d"] = p.m_d;
    e["ke_max_passive"] = p.ke_max_passive;
    e["free_motion_rms"] = p.free_motion_rms;
    e["energy"]["net"] = p.energy_net;
    e["energy"]["absorbed"] = p.energy_absorbed;
    e["energy"]["injected"] = p.energy_injected;
    e["energy"]["replay_gap"] = p.energy_replay_gap;
    e["stability_integral"] = p.stability_integral;
    e["bounces"] = p.bounce_count;
    e["converged"] = p.converged;
    j["points"].push_back(e);
  }
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("write_zwidth_json: cannot open " + path);
  }
  out << j.dump(2) << "\n";
}

}  // namespace vdcsim
