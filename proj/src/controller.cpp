#include "vdcsim/controller.hpp"

namespace vdcsim {

Vec6 required_net_force(const RegressorMatrix& Y_r, const Vec10& phi_hat,
                        const Mat6& K, const Vec6& V_r, const Vec6& V) {
  return Y_r * phi_hat + K * (V_r - V);
}

double virtual_power_flow(const Vec6& V_r, const Vec6& V, const Vec6& F_r,
                          const Vec6& F) {
  return (V_r - V).dot(F_r - F);
}

double virtual_power_flow(const SpatialVector& V_r, const SpatialVector& V,
                          const SpatialVector& F_r, const SpatialVector& F) {
  if (V_r.kind != VecKind::Velocity || V.kind != VecKind::Velocity ||
      F_r.kind != VecKind::Force || F.kind != VecKind::Force) {
    throw FrameError("virtual_power_flow: kind mismatch");
  }
  if (V_r.frame != V.frame || V.frame != F_r.frame || F_r.frame != F.frame) {
    throw FrameError("virtual_power_flow: vectors span different frames");
  }
  return virtual_power_flow(V_r.value, V.value, F_r.value, F.value);
}

double stability_function(const Vec6& upsilon, const Vec6& e_f) {
  return upsilon.dot(e_f);
}

double stability_function_expanded(const ImpedanceSpec& spec,
                                   const Vec6& e_x_dot, const Vec6& e_x,
                                   const Vec6& psi, const Vec6& f_des_minus_f) {
  return (-e_x_dot - spec.theta_e * e_x - spec.theta_psi * psi)
      .dot(f_des_minus_f);
}

EnergyBreakdown contact_energy(const std::vector<double>& force,
                               const std::vector<double>& velocity,
                               double dt) {
  if (force.size() != velocity.size()) {
    throw std::invalid_argument("contact_energy: length mismatch");
  }
  EnergyBreakdown e;
  for (size_t k = 0; k + 1 < force.size(); ++k) {
    const double p = 0.5 * dt *
                     (force[k] * velocity[k] + force[k + 1] * velocity[k + 1]);
    e.absorbed += std::max(p, 0.0);
    e.injected += std::min(p, 0.0);
  }
  e.net = e.absorbed + e.injected;
  return e;
}

VdcController::VdcController(ChainModel model, ImpedanceSpec impedance,
                             Options options, AdaptState adapt)
    : model_(std::move(model)),
      impedance_(std::move(impedance)),
      options_(std::move(options)),
      adapt_(std::move(adapt)) {
  model_.validate();
  gains_ = derive_gains(impedance_);
  if (options_.K_body.size() != static_cast<size_t>(model_.dof())) {
    throw std::invalid_argument("VdcController: K_body size mismatch");
  }
  for (const Mat6& k : options_.K_body) {
    if (min_eigenvalue(k) <= 0.0 || (k - k.transpose()).norm() > 1e-9) {
      throw std::invalid_argument("VdcController: K_body must be SPD");
    }
  }
  if (adapt_.L_hat.size() != static_cast<size_t>(model_.dof())) {
    throw std::invalid_argument("VdcController: adaptation state size mismatch");
  }
}

VdcController::Output VdcController::step(const VecX& q, const VecX& qdot,
                                          const Vec6& xd, const Vec6& xd_dot,
                                          const Vec6& xd_ddot,
                                          const Vec6& f_task,
                                          const Vec6& f_desired, double dt) {
  const int n = model_.dof();
  Output out;

  const KinematicsCache kin = compute_kinematics(model_, q);
  const TaskJacobian tj = task_jacobian(model_, kin, qdot);
  out.representation_singular = tj.representation_singular;
  out.pose = tj.pose;
  out.task_vel = tj.J * qdot;

  out.e_x = tj.pose - xd;
  out.e_x_dot = out.task_vel - xd_dot;
  out.e_f = f_task - f_desired;
  out.psi = psi_;

  const RequiredTask ref = required_task(impedance_, gains_, psi_, out.e_x,
                                         out.e_x_dot, out.e_f, xd_dot, xd_ddot);
  out.vel_r = ref.vel;
  out.acc_r = ref.acc;
  out.upsilon = out.task_vel - ref.vel;

  const RequiredJoint rj =
      required_joint(tj.J, tj.Jdot, ref.vel, ref.acc,
                     options_.pinv_sigma_threshold, options_.pinv_lambda);
  out.qdot_r = rj.qdot_r;
  out.qddot_r = rj.qddot_r;

  out.body_vel = propagate_velocity(model_, kin, qdot);
  PropagatedMotion req =
      propagate_motion(model_, kin, rj.qdot_r, qdot, rj.qddot_r);
  out.body_vel_r = std::move(req.vel);
  out.body_acc_r = std::move(req.acc);

  std::vector<Vec6> net(n);
  out.eta.resize(n);
  for (int i = 0; i < n; ++i) {
    const Vec3 g_body =
        kin.base_to_body[i].rotation().transpose() * model_.gravity;
    const RegressorMatrix y =
        regressor(out.body_acc_r[i], out.body_vel_r[i], out.body_vel[i], g_body);
    net[i] = required_net_force(y, adapt_.phi_hat(i), options_.K_body[i],
                                out.body_vel_r[i], out.body_vel[i]);
    out.eta[i] =
        adaptation_signal(y, out.body_vel_r[i], out.body_vel[i]);
  }
  const Vec6& tip_required =
      options_.tip_wrench_mode == TipWrenchMode::Desired ? f_desired : f_task;
  out.required_transmitted = propagate_force(model_, kin, net, tip_required);

  out.tau = joint_projection(model_, out.required_transmitted);
  for (int i = 0; i < n; ++i) {
    out.tau(i) += model_.joints[i].viscous_friction * rj.qdot_r(i);
  }

  if (options_.adapt_enabled) {
    nal_update(adapt_, out.eta, dt);
  }
  psi_ = psi_step(impedance_, gains_, psi_, out.e_x, out.e_x_dot, out.e_f, dt);
  return out;
}

}  // namespace vdcsim
