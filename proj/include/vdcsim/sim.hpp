#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vdcsim/controller.hpp"

namespace vdcsim {

/// Unilateral spring environment f_c = K_e * (z - z_e) on one task axis.
/// `side_below` chooses which half-space is solid: true means the wall fills
/// z < z_e and contact happens when the tip drops below it. The bilateral
/// variant applies the spring law on both sides (no contact loss possible).
struct VirtualWall {
  bool enabled = false;
  double stiffness = 1000.0;
  double position = 0.0;
  int axis = 2;
  bool unilateral = true;
  bool side_below = true;

  /// Geometric penetration test (independent of the unilateral switch).
  bool in_contact(double z) const;
  /// Scalar contact force the robot applies to the environment.
  double force(double z) const;
  Vec6 wrench(const Vec6& pose) const;
};

/// One quintic segment: rest-to-rest motion from `start` to `target` over
/// `duration` seconds beginning at absolute time `t0`.
struct QuinticSegment {
  Vec6 start = Vec6::Zero();
  Vec6 target = Vec6::Zero();
  double t0 = 0.0;
  double duration = 1.0;
};

/// Evaluate the smooth profile s = 10 tau^3 - 15 tau^4 + 6 tau^5 for the
/// segment at absolute time t (clamped to the segment span). Throws
/// std::invalid_argument when duration <= 0.
void quintic_eval(const QuinticSegment& seg, double t, Vec6& pose, Vec6& vel,
                  Vec6& acc);

/// Piecewise trajectory: quintic segments separated by holds. Before the
/// first segment `base_pose` is held; between and after segments the most
/// recent target is held.
struct TrajectoryPlan {
  Vec6 base_pose = Vec6::Zero();
  std::vector<QuinticSegment> segments;

  void eval(double t, Vec6& pose, Vec6& vel, Vec6& acc) const;

  /// Append a segment starting where the previous one ended, after an extra
  /// hold of `hold` seconds.
  void append(const Vec6& target, double duration, double hold = 0.0);

  double horizon() const;
};

enum class PlantMode { Chain, Ideal };

/// How the desired interaction wrench is produced each step. Constant uses
/// the configured vector (optionally only while in contact); WallConsistent
/// evaluates the wall law at the desired pose, so a desired pose resting
/// inside the wall commands exactly the force needed to hold it there.
enum class DesiredForceMode { Constant, WallConsistent };

/// Direct injection into the measured interaction force (test scenarios).
struct ForceStep {
  int channel = 2;
  double magnitude = 0.0;
  double start = 0.0;
};

/// Trajectory description as configured: targets with durations and holds,
/// resolved against the run's start pose when `relative` is set.
struct TrajectoryStep {
  Vec6 target = Vec6::Zero();
  double duration = 1.0;
  double hold = 0.0;
  bool relative = false;
};

struct RunOptions {
  double dt = 1e-3;
  double duration = 5.0;
  std::uint64_t seed = 0;
  PlantMode plant = PlantMode::Chain;
  VecX initial_q;
  std::string telemetry_path;
  std::string summary_path;
};

struct ExperimentConfig {
  ChainModel model;
  ImpedanceSpec impedance;
  double gamma = 10.0;
  double initial_estimate_scale = 0.5;
  bool adapt_enabled = true;
  std::vector<Mat6> K_body;
  double pinv_sigma_threshold = 0.05;
  double pinv_lambda = 0.01;
  double force_filter_cutoff_hz = 0.0;
  TipWrenchMode tip_wrench_mode = TipWrenchMode::Desired;
  VirtualWall wall;
  std::vector<TrajectoryStep> trajectory;
  std::optional<Vec6> trajectory_start;
  DesiredForceMode desired_force_mode = DesiredForceMode::Constant;
  Vec6 desired_force = Vec6::Zero();
  bool desired_force_contact_only = true;
  std::optional<ForceStep> force_step;
  RunOptions run;

  /// Static consistency checks across all sections. Throws
  /// std::invalid_argument with a descriptive message.
  void validate() const;
};

/// Scalar results of one run; everything here lands in the summary JSON.
struct RunSummary {
  int steps = 0;
  double dt = 0.0;
  double duration = 0.0;
  bool diverged = false;
  std::string diverged_reason;
  double energy_net = 0.0;
  double energy_absorbed = 0.0;
  double energy_injected = 0.0;
  double min_running_energy = 0.0;
  double max_abs_upsilon = 0.0;
  double max_abs_upsilon_after_transient = 0.0;
  double max_abs_upsilon_sustained_contact = 0.0;
  double min_pseudo_inertia_eig = 0.0;
  int spd_projections = 0;
  double stability_integral = 0.0;
  double max_abs_stability_free = 0.0;
  double max_stability_form_gap = 0.0;
  int bounce_count = 0;
  int contact_steps = 0;
  int first_contact_step = -1;
  double first_contact_time = -1.0;
  double last_contact_time = -1.0;
  double free_motion_rms_error = 0.0;
  Vec6 final_pose = Vec6::Zero();
  Vec6 final_e_x = Vec6::Zero();
};

/// Summary plus the per-step traces needed for replay and trend checks.
struct RunResult {
  RunSummary summary;
  std::vector<double> t;
  std::vector<double> contact_force;
  std::vector<double> contact_velocity;
  std::vector<double> e_z;
  std::vector<double> upsilon_norm;
  std::vector<Vec6> acc_r;
};

/// Execute a full run. When `telemetry_path` in the config is nonempty the
/// per-step CSV is written there; the summary JSON goes to `summary_path`
/// when set.
RunResult run_experiment(const ExperimentConfig& config);

}  // namespace vdcsim
