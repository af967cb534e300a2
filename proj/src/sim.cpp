#include "vdcsim/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "vdcsim/telemetry.hpp"

namespace vdcsim {

bool VirtualWall::in_contact(double z) const {
  if (!enabled) {
    return false;
  }
  return side_below ? (z < position) : (z > position);
}

double VirtualWall::force(double z) const {
  if (!enabled) {
    return 0.0;
  }
  if (unilateral && !in_contact(z)) {
    return 0.0;
  }
  return stiffness * (z - position);
}

Vec6 VirtualWall::wrench(const Vec6& pose) const {
  Vec6 w = Vec6::Zero();
  if (enabled) {
    w(axis) = force(pose(axis));
  }
  return w;
}

void quintic_eval(const QuinticSegment& seg, double t, Vec6& pose, Vec6& vel,
                  Vec6& acc) {
  if (seg.duration <= 0.0) {
    throw std::invalid_argument("quintic_eval: duration must be positive");
  }
  const double tau =
      std::clamp((t - seg.t0) / seg.duration, 0.0, 1.0);
  const double t2 = tau * tau;
  const double t3 = t2 * tau;
  const double t4 = t3 * tau;
  const double t5 = t4 * tau;
  const double s = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
  const double ds = (30.0 * t2 - 60.0 * t3 + 30.0 * t4) / seg.duration;
  const double dds =
      (60.0 * tau - 180.0 * t2 + 120.0 * t3) / (seg.duration * seg.duration);
  const Vec6 delta = seg.target - seg.start;
  pose = seg.start + s * delta;
  vel = ds * delta;
  acc = dds * delta;
}

void TrajectoryPlan::eval(double t, Vec6& pose, Vec6& vel, Vec6& acc) const {
  vel.setZero();
  acc.setZero();
  if (segments.empty() || t < segments.front().t0) {
    pose = segments.empty() ? base_pose : segments.front().start;
    return;
  }
  size_t active = 0;
  for (size_t i = 0; i < segments.size(); ++i) {
    if (segments[i].t0 <= t) {
      active = i;
    }
  }
  const QuinticSegment& seg = segments[active];
  if (t <= seg.t0 + seg.duration) {
    quintic_eval(seg, t, pose, vel, acc);
  } else {
    pose = seg.target;
  }
}

void TrajectoryPlan::append(const Vec6& target, double duration, double hold) {
  QuinticSegment seg;
  seg.start = segments.empty() ? base_pose : segments.back().target;
  seg.target = target;
  seg.t0 = horizon() + hold;
  seg.duration = duration;
  segments.push_back(seg);
}

double TrajectoryPlan::horizon() const {
  return segments.empty() ? 0.0
                          : segments.back().t0 + segments.back().duration;
}

void ExperimentConfig::validate() const {
  if (run.dt <= 0.0) {
    throw std::invalid_argument("config: dt must be positive");
  }
  if (run.duration <= 0.0) {
    throw std::invalid_argument("config: duration must be positive");
  }
  impedance.validate();
  if (gamma <= 0.0) {
    throw std::invalid_argument("config: gamma must be positive");
  }
  if (initial_estimate_scale <= 0.0) {
    throw std::invalid_argument("config: initial estimate scale must be positive");
  }
  if (wall.enabled && wall.stiffness <= 0.0) {
    throw std::invalid_argument("config: wall stiffness must be positive");
  }
  if (wall.axis < 0 || wall.axis > 5) {
    throw std::invalid_argument("config: wall axis out of range");
  }
  if (force_filter_cutoff_hz < 0.0) {
    throw std::invalid_argument("config: force filter cutoff must be >= 0");
  }
  double horizon = 0.0;
  for (const TrajectoryStep& s : trajectory) {
    if (s.duration <= 0.0) {
      throw std::invalid_argument("config: trajectory duration must be positive");
    }
    if (s.hold < 0.0) {
      throw std::invalid_argument("config: trajectory hold must be >= 0");
    }
    horizon += s.duration + s.hold;
  }
  if (run.duration + 1e-12 < horizon) {
    throw std::invalid_argument(
        "config: duration shorter than the trajectory horizon");
  }
  if (force_step && (force_step->channel < 0 || force_step->channel > 5)) {
    throw std::invalid_argument("config: force step channel out of range");
  }
  if (run.plant == PlantMode::Chain) {
    model.validate();
    if (run.initial_q.size() != model.dof()) {
      throw std::invalid_argument("config: initial_q size mismatch");
    }
    if (K_body.size() != static_cast<size_t>(model.dof())) {
      throw std::invalid_argument("config: K_body count mismatch");
    }
  } else if (!trajectory_start.has_value() && run.initial_q.size() == 0) {
    throw std::invalid_argument(
        "config: ideal plant needs trajectory_start or initial_q");
  }
}

namespace {

Vec6 step_force_at(const std::optional<ForceStep>& fs, double t) {
  Vec6 w = Vec6::Zero();
  if (fs && t >= fs->start) {
    w(fs->channel) = fs->magnitude;
  }
  return w;
}

Vec6 desired_force_at(const ExperimentConfig& cfg, const Vec6& xd,
                      bool contact) {
  if (cfg.desired_force_mode == DesiredForceMode::WallConsistent) {
    return cfg.wall.wrench(xd);
  }
  return (!cfg.desired_force_contact_only || contact) ? cfg.desired_force
                                                      : Vec6::Zero();
}

TrajectoryPlan build_plan(const ExperimentConfig& cfg, const Vec6& start) {
  TrajectoryPlan plan;
  plan.base_pose = start;
  for (const TrajectoryStep& s : cfg.trajectory) {
    const Vec6 target = s.relative
                            ? Vec6(plan.segments.empty()
                                       ? Vec6(plan.base_pose + s.target)
                                       : Vec6(plan.segments.back().target +
                                              s.target))
                            : s.target;
    plan.append(target, s.duration, s.hold);
  }
  return plan;
}

/// Everything accumulated step by step, finalized into the summary.
struct Monitors {
  const ExperimentConfig& cfg;
  RunResult& res;

  bool prev_contact = false;
  double e_abs = 0.0;
  double e_inj = 0.0;
  double min_running = 0.0;
  double s_prev = 0.0;
  bool have_s = false;
  std::vector<char> in_window;

  explicit Monitors(const ExperimentConfig& c, RunResult& r) : cfg(c), res(r) {}

  void record(double t, bool contact, double f_c, double v_z, const Vec6& e_x,
              const Vec6& upsilon, double s_val, double s_expanded,
              const Vec6& e_f) {
    RunSummary& sum = res.summary;
    const size_t k = res.t.size();
    res.t.push_back(t);
    res.contact_force.push_back(f_c);
    res.contact_velocity.push_back(v_z);
    res.e_z.push_back(e_x(cfg.wall.axis));
    res.upsilon_norm.push_back(upsilon.lpNorm<Eigen::Infinity>());

    if (contact) {
      ++sum.contact_steps;
      if (sum.first_contact_step < 0) {
        sum.first_contact_step = static_cast<int>(k);
        sum.first_contact_time = t;
      }
      sum.last_contact_time = t;
    }
    if (prev_contact && !contact && sum.first_contact_step >= 0) {
      ++sum.bounce_count;
    }
    prev_contact = contact;

    if (sum.first_contact_step >= 0 &&
        k > static_cast<size_t>(sum.first_contact_step)) {
      const double p =
          0.5 * cfg.run.dt *
          (res.contact_force[k - 1] * res.contact_velocity[k - 1] + f_c * v_z);
      e_abs += std::max(p, 0.0);
      e_inj += std::min(p, 0.0);
      min_running = std::min(min_running, e_abs + e_inj);
    }

    if (have_s) {
      sum.stability_integral += 0.5 * cfg.run.dt * (s_prev + s_val);
    }
    s_prev = s_val;
    have_s = true;
    sum.max_stability_form_gap =
        std::max(sum.max_stability_form_gap, std::abs(s_val - s_expanded));
    if (e_f.isZero(0.0)) {
      sum.max_abs_stability_free =
          std::max(sum.max_abs_stability_free, std::abs(s_val));
    }

    const double u_inf = res.upsilon_norm.back();
    sum.max_abs_upsilon = std::max(sum.max_abs_upsilon, u_inf);
    if (t >= 0.5) {
      sum.max_abs_upsilon_after_transient =
          std::max(sum.max_abs_upsilon_after_transient, u_inf);
    }
    if (contact && sum.first_contact_time >= 0.0 &&
        t >= sum.first_contact_time + 1.0) {
      sum.max_abs_upsilon_sustained_contact =
          std::max(sum.max_abs_upsilon_sustained_contact, u_inf);
    }
  }

  void finalize() {
    RunSummary& sum = res.summary;
    sum.energy_absorbed = e_abs;
    sum.energy_injected = e_inj;
    sum.energy_net = e_abs + e_inj;
    sum.min_running_energy = min_running;
    sum.steps = static_cast<int>(res.t.size());
    sum.dt = cfg.run.dt;
    sum.duration = cfg.run.duration;

    // Free-motion tracking error: every step outside the contact window
    // (before first contact, after final release).
    const int first = sum.first_contact_step;
    const double t_last = sum.last_contact_time;
    double acc = 0.0;
    int count = 0;
    for (size_t k = 0; k < res.t.size(); ++k) {
      const bool inside = first >= 0 && k >= static_cast<size_t>(first) &&
                          res.t[k] <= t_last;
      if (!inside) {
        acc += res.e_z[k] * res.e_z[k];
        ++count;
      }
    }
    sum.free_motion_rms_error = count > 0 ? std::sqrt(acc / count) : 0.0;
  }
};

std::vector<std::string> vec_cols(const std::string& base, int n) {
  std::vector<std::string> c;
  for (int i = 0; i < n; ++i) {
    c.push_back(base + std::to_string(i));
  }
  return c;
}

void extend(std::vector<std::string>& dst, const std::vector<std::string>& src) {
  dst.insert(dst.end(), src.begin(), src.end());
}

void push_vec(std::vector<double>& row, const Eigen::Ref<const VecX>& v) {
  for (int i = 0; i < v.size(); ++i) {
    row.push_back(v(i));
  }
}

RunResult run_chain(const ExperimentConfig& cfg) {
  const ChainModel& model = cfg.model;
  const int n = model.dof();
  const double dt = cfg.run.dt;
  const int steps = static_cast<int>(std::llround(cfg.run.duration / dt));

  RunResult res;
  Monitors mon(cfg, res);

  VecX q = cfg.run.initial_q;
  VecX qd = VecX::Zero(n);

  const TipPose init_pose = tip_pose(compute_kinematics(model, q).base_to_tip);
  const Vec6 start =
      cfg.trajectory_start.value_or(init_pose.pose);
  const TrajectoryPlan plan = build_plan(cfg, start);

  VdcController::Options copts;
  copts.K_body = cfg.K_body;
  copts.pinv_sigma_threshold = cfg.pinv_sigma_threshold;
  copts.pinv_lambda = cfg.pinv_lambda;
  copts.adapt_enabled = cfg.adapt_enabled;
  copts.tip_wrench_mode = cfg.tip_wrench_mode;
  VdcController controller(
      model, cfg.impedance, copts,
      AdaptState::uniform(n, cfg.initial_estimate_scale, cfg.gamma));

  std::unique_ptr<CsvWriter> csv;
  if (!cfg.run.telemetry_path.empty()) {
    csv = std::make_unique<CsvWriter>(cfg.run.telemetry_path);
    std::vector<std::string> cols{"t"};
    extend(cols, vec_cols("q", n));
    extend(cols, vec_cols("qd", n));
    extend(cols, vec_cols("X", 6));
    extend(cols, vec_cols("Xd", 6));
    extend(cols, vec_cols("ex", 6));
    extend(cols, vec_cols("ef", 6));
    extend(cols, vec_cols("ups", 6));
    extend(cols, vec_cols("psi", 6));
    extend(cols, vec_cols("tau", n));
    cols.push_back("f_c");
    extend(cols, vec_cols("vpf", n));
    cols.push_back("S");
    cols.push_back("E_net");
    cols.push_back("E_abs");
    cols.push_back("E_inj");
    extend(cols, vec_cols("Lmin", n));
    csv->header(cols);
  }

  RunSummary& sum = res.summary;
  sum.min_pseudo_inertia_eig = std::numeric_limits<double>::infinity();

  Vec6 f_filtered = Vec6::Zero();
  bool filter_ready = false;
  const double alpha =
      cfg.force_filter_cutoff_hz > 0.0
          ? 1.0 - std::exp(-2.0 * M_PI * cfg.force_filter_cutoff_hz * dt)
          : 1.0;

  Vec6 xd, xdv, xda;
  for (int k = 0; k < steps; ++k) {
    const double t = k * dt;
    plan.eval(t, xd, xdv, xda);

    const KinematicsCache kin = compute_kinematics(model, q);
    const TipPose tp = tip_pose(kin.base_to_tip);
    const Vec6 f_wall = cfg.wall.wrench(tp.pose);
    const double f_c = f_wall(cfg.wall.axis);
    const bool contact = cfg.wall.in_contact(tp.pose(cfg.wall.axis));

    const Vec6 f_meas = f_wall + step_force_at(cfg.force_step, t);
    if (!filter_ready) {
      f_filtered = f_meas;
      filter_ready = true;
    } else {
      f_filtered += alpha * (f_meas - f_filtered);
    }
    const Vec6 f_des = desired_force_at(cfg, xd, contact);

    VdcController::Output out =
        controller.step(q, qd, xd, xdv, xda, f_filtered, f_des, dt);
    if (out.representation_singular) {
      sum.diverged = true;
      sum.diverged_reason = "orientation representation singular";
      break;
    }

    // First integrator stage doubles as the current acceleration for the
    // actual-force recursion behind the VPF monitor.
    const VecX a1 = forward_dynamics(model, q, qd, out.tau, f_wall);
    PropagatedMotion act = propagate_motion(model, kin, qd, qd, a1);
    std::vector<Vec6> net(n);
    for (int i = 0; i < n; ++i) {
      const Vec3 g_body =
          kin.base_to_body[i].rotation().transpose() * model.gravity;
      const InertialParams& b = model.bodies[i];
      net[i] = spatial_mass_matrix(b) * act.acc[i] +
               velocity_product_matrix(b, act.vel[i]) * act.vel[i] +
               gravity_wrench(b, g_body);
    }
    const std::vector<Vec6> f_act = propagate_force(model, kin, net, f_wall);
    VecX vpf(n);
    for (int i = 0; i < n; ++i) {
      vpf(i) = virtual_power_flow(out.body_vel_r[i], out.body_vel[i],
                                  out.required_transmitted[i], f_act[i]);
    }

    const double s_val = stability_function(out.upsilon, out.e_f);
    const double s_exp = stability_function_expanded(
        cfg.impedance, out.e_x_dot, out.e_x, out.psi, f_des - f_filtered);
    const double v_z = out.task_vel(cfg.wall.axis);
    mon.record(t, contact, f_c, v_z, out.e_x, out.upsilon, s_val, s_exp,
               out.e_f);
    res.acc_r.push_back(out.acc_r);

    VecX lmin(n);
    for (int i = 0; i < n; ++i) {
      lmin(i) = min_eigenvalue(controller.adapt().L_hat[i]);
      sum.min_pseudo_inertia_eig = std::min(sum.min_pseudo_inertia_eig, lmin(i));
    }

    if (csv) {
      std::vector<double> row{t};
      push_vec(row, q);
      push_vec(row, qd);
      push_vec(row, out.pose);
      push_vec(row, xd);
      push_vec(row, out.e_x);
      push_vec(row, out.e_f);
      push_vec(row, out.upsilon);
      push_vec(row, out.psi);
      push_vec(row, out.tau);
      row.push_back(f_c);
      push_vec(row, vpf);
      row.push_back(s_val);
      row.push_back(mon.e_abs + mon.e_inj);
      row.push_back(mon.e_abs);
      row.push_back(mon.e_inj);
      push_vec(row, lmin);
      csv->row(row);
    }

    // Plant update: torque and contact wrench held over the period.
    const VecX k1q = qd;
    const VecX& k1v = a1;
    const VecX k2q = qd + 0.5 * dt * k1v;
    const VecX k2v =
        forward_dynamics(model, q + 0.5 * dt * k1q, k2q, out.tau, f_wall);
    const VecX k3q = qd + 0.5 * dt * k2v;
    const VecX k3v =
        forward_dynamics(model, q + 0.5 * dt * k2q, k3q, out.tau, f_wall);
    const VecX k4q = qd + dt * k3v;
    const VecX k4v = forward_dynamics(model, q + dt * k3q, k4q, out.tau, f_wall);
    q += (dt / 6.0) * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
    qd += (dt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);

    sum.final_pose = out.pose;
    sum.final_e_x = out.e_x;

    double l_hat_norm = 0.0;
    for (int i = 0; i < n; ++i) {
      l_hat_norm = std::max(l_hat_norm, controller.adapt().L_hat[i].norm());
    }
    if (!q.allFinite() || !qd.allFinite() || !lmin.allFinite() ||
        !std::isfinite(l_hat_norm)) {
      sum.diverged = true;
      sum.diverged_reason = "non-finite joint state";
      break;
    }
    if (qd.lpNorm<Eigen::Infinity>() > 1e4 ||
        out.e_x.lpNorm<Eigen::Infinity>() > 10.0 || l_hat_norm > 1e8) {
      sum.diverged = true;
      sum.diverged_reason = "state runaway";
      break;
    }
  }

  sum.spd_projections = controller.adapt().spd_projections;
  mon.finalize();
  if (!cfg.run.summary_path.empty()) {
    write_summary_json(sum, cfg.run.summary_path);
  }
  return res;
}

using Vec18 = Eigen::Matrix<double, 18, 1>;

RunResult run_ideal(const ExperimentConfig& cfg) {
  const double dt = cfg.run.dt;
  const int steps = static_cast<int>(std::llround(cfg.run.duration / dt));

  RunResult res;
  Monitors mon(cfg, res);
  RunSummary& sum = res.summary;

  Vec6 start;
  if (cfg.trajectory_start.has_value()) {
    start = *cfg.trajectory_start;
  } else {
    start = tip_pose(compute_kinematics(cfg.model, cfg.run.initial_q).base_to_tip)
                .pose;
  }
  const TrajectoryPlan plan = build_plan(cfg, start);
  const AllocatorGains gains = derive_gains(cfg.impedance);
  const ImpedanceSpec& imp = cfg.impedance;

  auto forces = [&](double t, const Vec6& pose, const Vec6& xd_t, Vec6& f,
                    Vec6& f_des) {
    f = cfg.wall.wrench(pose) + step_force_at(cfg.force_step, t);
    const bool contact = cfg.wall.in_contact(pose(cfg.wall.axis));
    f_des = desired_force_at(cfg, xd_t, contact);
  };

  auto deriv = [&](double t, const Vec18& y) -> Vec18 {
    const Vec6 e = y.segment<6>(0);
    const Vec6 ed = y.segment<6>(6);
    const Vec6 psi = y.segment<6>(12);
    Vec6 xd_t, xdv_t, xda_t;
    plan.eval(t, xd_t, xdv_t, xda_t);
    Vec6 f, f_des;
    forces(t, Vec6(xd_t + e), xd_t, f, f_des);
    const Vec6 e_f = f - f_des;
    const Vec6 psi_dot = psi_derivative(imp, gains, psi, e, ed, e_f);
    Vec18 dy;
    dy.segment<6>(0) = ed;
    dy.segment<6>(6) = -imp.theta_e * ed - imp.theta_psi * psi_dot;
    dy.segment<6>(12) = psi_dot;
    return dy;
  };

  std::unique_ptr<CsvWriter> csv;
  if (!cfg.run.telemetry_path.empty()) {
    csv = std::make_unique<CsvWriter>(cfg.run.telemetry_path);
    std::vector<std::string> cols{"t"};
    extend(cols, vec_cols("X", 6));
    extend(cols, vec_cols("Xd", 6));
    extend(cols, vec_cols("ex", 6));
    extend(cols, vec_cols("ef", 6));
    extend(cols, vec_cols("ups", 6));
    extend(cols, vec_cols("psi", 6));
    cols.push_back("f_c");
    cols.push_back("S");
    cols.push_back("E_net");
    cols.push_back("E_abs");
    cols.push_back("E_inj");
    csv->header(cols);
  }

  Vec18 y = Vec18::Zero();
  Vec6 xd, xdv, xda;
  for (int k = 0; k < steps; ++k) {
    const double t = k * dt;
    plan.eval(t, xd, xdv, xda);
    const Vec6 e = y.segment<6>(0);
    const Vec6 ed = y.segment<6>(6);
    const Vec6 psi = y.segment<6>(12);
    const Vec6 pose = xd + e;

    Vec6 f, f_des;
    forces(t, pose, xd, f, f_des);
    const Vec6 e_f = f - f_des;
    const double f_c = cfg.wall.wrench(pose)(cfg.wall.axis);
    const bool contact = cfg.wall.in_contact(pose(cfg.wall.axis));

    const Vec6 upsilon = sliding_surface(imp, ed, e, psi);
    const double s_val = stability_function(upsilon, e_f);
    const double s_exp =
        stability_function_expanded(imp, ed, e, psi, f_des - f);
    const double v_z = (ed + xdv)(cfg.wall.axis);
    mon.record(t, contact, f_c, v_z, e, upsilon, s_val, s_exp, e_f);

    const Vec6 psi_dot = psi_derivative(imp, gains, psi, e, ed, e_f);
    res.acc_r.push_back(xda - imp.theta_e * ed - imp.theta_psi * psi_dot);

    if (csv) {
      std::vector<double> row{t};
      push_vec(row, pose);
      push_vec(row, xd);
      push_vec(row, e);
      push_vec(row, e_f);
      push_vec(row, upsilon);
      push_vec(row, psi);
      row.push_back(f_c);
      row.push_back(s_val);
      row.push_back(mon.e_abs + mon.e_inj);
      row.push_back(mon.e_abs);
      row.push_back(mon.e_inj);
      csv->row(row);
    }

    const Vec18 k1 = deriv(t, y);
    const Vec18 k2 = deriv(t + 0.5 * dt, y + 0.5 * dt * k1);
    const Vec18 k3 = deriv(t + 0.5 * dt, y + 0.5 * dt * k2);
    const Vec18 k4 = deriv(t + dt, y + dt * k3);
    y += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    sum.final_pose = pose;
    sum.final_e_x = e;

    if (!y.allFinite()) {
      sum.diverged = true;
      sum.diverged_reason = "non-finite state";
      break;
    }
    if (y.segment<6>(0).lpNorm<Eigen::Infinity>() > 10.0) {
      sum.diverged = true;
      sum.diverged_reason = "state runaway";
      break;
    }
  }

  mon.finalize();
  if (!cfg.run.summary_path.empty()) {
    write_summary_json(sum, cfg.run.summary_path);
  }
  return res;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  return config.run.plant == PlantMode::Chain ? run_chain(config)
                                              : run_ideal(config);
}

}  // namespace vdcsim
