#include "vdcsim/chain.hpp"

#include <cmath>
#include <set>

namespace vdcsim {

Vec6 JointDesc::screw() const {
  Vec6 s = Vec6::Zero();
  if (type == JointType::Revolute) {
    s.tail<3>() = axis;
  } else {
    s.head<3>() = axis;
  }
  return s;
}

void ChainModel::validate() const {
  const size_t n = joints.size();
  if (n == 0) {
    throw std::invalid_argument("ChainModel: empty chain");
  }
  if (bodies.size() != n || body_frames.size() != n) {
    throw std::invalid_argument(
        "ChainModel: joints, bodies and body_frames must have equal length");
  }
  std::set<std::string> names{base_frame, tip_frame};
  for (const auto& f : body_frames) {
    if (f.empty() || !names.insert(f).second) {
      throw std::invalid_argument("ChainModel: frame names must be unique");
    }
  }
  for (const auto& j : joints) {
    if (std::abs(j.axis.norm() - 1.0) > 1e-9) {
      throw std::invalid_argument("ChainModel: joint axis must be unit length");
    }
    if (!(j.limit_lower <= j.limit_upper)) {
      throw std::invalid_argument("ChainModel: joint limits out of order");
    }
    if (j.viscous_friction < 0.0) {
      throw std::invalid_argument("ChainModel: negative viscous friction");
    }
    if (!is_rotation(j.zero_rotation)) {
      throw std::invalid_argument("ChainModel: joint zero_rotation invalid");
    }
  }
  for (const auto& b : bodies) {
    if (!physically_consistent(b)) {
      throw std::invalid_argument(
          "ChainModel: body parameters are not physically consistent");
    }
  }
  if (!is_rotation(tip_rotation)) {
    throw std::invalid_argument("ChainModel: tip_rotation invalid");
  }
  if (!gravity.allFinite()) {
    throw std::invalid_argument("ChainModel: gravity must be finite");
  }
}

namespace {

SpatialTransform joint_transform(const JointDesc& j, double q,
                                 const FrameId& parent, const FrameId& child) {
  if (j.type == JointType::Revolute) {
    Mat3 r = j.zero_rotation * Eigen::AngleAxisd(q, j.axis).toRotationMatrix();
    return SpatialTransform(r, j.zero_offset, parent, child);
  }
  Vec3 t = j.zero_offset + j.zero_rotation * (j.axis * q);
  return SpatialTransform(j.zero_rotation, t, parent, child);
}

SpatialTransform tip_attachment(const ChainModel& model) {
  return SpatialTransform(model.tip_rotation, model.tip_offset,
                          model.body_frames.back(), model.tip_frame);
}

}  // namespace

KinematicsCache compute_kinematics(const ChainModel& model, const VecX& q) {
  const int n = model.dof();
  if (q.size() != n) {
    throw std::invalid_argument("compute_kinematics: q has wrong dimension");
  }
  KinematicsCache kin;
  kin.parent_to_child.reserve(n);
  kin.base_to_body.reserve(n);
  for (int i = 0; i < n; ++i) {
    const FrameId& parent =
        (i == 0) ? model.base_frame : model.body_frames[i - 1];
    kin.parent_to_child.push_back(
        joint_transform(model.joints[i], q(i), parent, model.body_frames[i]));
    kin.base_to_body.push_back(
        (i == 0) ? kin.parent_to_child[0]
                 : compose(kin.base_to_body[i - 1], kin.parent_to_child[i]));
  }
  kin.base_to_tip = compose(kin.base_to_body.back(), tip_attachment(model));
  return kin;
}

TipPose tip_pose(const SpatialTransform& base_to_tip) {
  const Mat3& r = base_to_tip.rotation();
  TipPose out;
  out.pose.head<3>() = base_to_tip.offset();
  const double sb = std::clamp(r(0, 2), -1.0, 1.0);
  const double b = std::asin(sb);
  out.pose(3) = std::atan2(-r(1, 2), r(2, 2));
  out.pose(4) = b;
  out.pose(5) = std::atan2(-r(0, 1), r(0, 0));
  out.singular = std::abs(std::cos(b)) < 1e-6;
  return out;
}

std::vector<Vec6> propagate_velocity(const ChainModel& model,
                                     const KinematicsCache& kin,
                                     const VecX& qdot) {
  const int n = model.dof();
  std::vector<Vec6> vel(n);
  for (int i = 0; i < n; ++i) {
    Vec6 from_parent =
        (i == 0) ? Vec6::Zero().eval()
                 : transform_velocity(kin.parent_to_child[i], vel[i - 1]);
    vel[i] = from_parent + model.joints[i].screw() * qdot(i);
  }
  return vel;
}

Vec6 tip_velocity(const ChainModel& model, const Vec6& last_body_velocity) {
  return transform_velocity(tip_attachment(model), last_body_velocity);
}

PropagatedMotion propagate_motion(const ChainModel& model,
                                  const KinematicsCache& kin,
                                  const VecX& qdot_used,
                                  const VecX& qdot_actual,
                                  const VecX& qddot) {
  const int n = model.dof();
  PropagatedMotion out;
  out.vel.resize(n);
  out.acc.resize(n);
  for (int i = 0; i < n; ++i) {
    const Vec6 s = model.joints[i].screw();
    Vec6 v_parent = (i == 0) ? Vec6::Zero().eval()
                             : transform_velocity(kin.parent_to_child[i],
                                                  out.vel[i - 1]);
    Vec6 a_parent = (i == 0) ? Vec6::Zero().eval()
                             : transform_velocity(kin.parent_to_child[i],
                                                  out.acc[i - 1]);
    out.vel[i] = v_parent + s * qdot_used(i);
    // The frame itself moves with the actual rate, so the convective term
    // pairs the propagated reference velocity with qdot_actual.
    out.acc[i] =
        a_parent + s * qddot(i) + cross_motion(v_parent) * (s * qdot_actual(i));
  }
  const SpatialTransform to_tip = tip_attachment(model);
  out.tip_vel = transform_velocity(to_tip, out.vel.back());
  out.tip_acc = transform_velocity(to_tip, out.acc.back());
  return out;
}

std::vector<Vec6> propagate_force(const ChainModel& model,
                                  const KinematicsCache& kin,
                                  const std::vector<Vec6>& net_wrenches,
                                  const Vec6& tip_wrench) {
  const int n = model.dof();
  if (static_cast<int>(net_wrenches.size()) != n) {
    throw std::invalid_argument("propagate_force: wrong wrench count");
  }
  std::vector<Vec6> f(n);
  f[n - 1] =
      net_wrenches[n - 1] + transform_force(tip_attachment(model), tip_wrench);
  for (int i = n - 2; i >= 0; --i) {
    f[i] = net_wrenches[i] +
           transform_force(kin.parent_to_child[i + 1], f[i + 1]);
  }
  return f;
}

VecX joint_projection(const ChainModel& model,
                      const std::vector<Vec6>& transmitted) {
  const int n = model.dof();
  VecX tau(n);
  for (int i = 0; i < n; ++i) {
    tau(i) = model.joints[i].screw().dot(transmitted[i]);
  }
  return tau;
}

namespace {

VecX inverse_dynamics_impl(const ChainModel& model, const KinematicsCache& kin,
                           const VecX& qdot, const VecX& qddot,
                           const Vec6& tip_wrench, const Vec3& gravity,
                           bool with_friction) {
  const int n = model.dof();
  PropagatedMotion motion = propagate_motion(model, kin, qdot, qdot, qddot);
  std::vector<Vec6> net(n);
  for (int i = 0; i < n; ++i) {
    const Vec3 g_body = kin.base_to_body[i].rotation().transpose() * gravity;
    const InertialParams& b = model.bodies[i];
    net[i] = spatial_mass_matrix(b) * motion.acc[i] +
             velocity_product_matrix(b, motion.vel[i]) * motion.vel[i] +
             gravity_wrench(b, g_body);
  }
  VecX tau = joint_projection(model, propagate_force(model, kin, net, tip_wrench));
  if (with_friction) {
    for (int i = 0; i < n; ++i) {
      tau(i) += model.joints[i].viscous_friction * qdot(i);
    }
  }
  return tau;
}

}  // namespace

VecX inverse_dynamics(const ChainModel& model, const VecX& q, const VecX& qdot,
                      const VecX& qddot, const Vec6& tip_wrench) {
  KinematicsCache kin = compute_kinematics(model, q);
  return inverse_dynamics_impl(model, kin, qdot, qddot, tip_wrench,
                               model.gravity, true);
}

MatX joint_space_inertia(const ChainModel& model, const KinematicsCache& kin) {
  const int n = model.dof();
  MatX h(n, n);
  const VecX zero = VecX::Zero(n);
  for (int j = 0; j < n; ++j) {
    VecX ej = VecX::Zero(n);
    ej(j) = 1.0;
    h.col(j) = inverse_dynamics_impl(model, kin, zero, ej, Vec6::Zero(),
                                     Vec3::Zero(), false);
  }
  return 0.5 * (h + h.transpose());
}

VecX forward_dynamics(const ChainModel& model, const VecX& q, const VecX& qdot,
                      const VecX& tau, const Vec6& tip_wrench) {
  KinematicsCache kin = compute_kinematics(model, q);
  const VecX bias =
      inverse_dynamics_impl(model, kin, qdot, VecX::Zero(model.dof()),
                            tip_wrench, model.gravity, true);
  MatX h = joint_space_inertia(model, kin);
  return h.ldlt().solve(tau - bias);
}

void geometric_jacobian(const ChainModel& model, const KinematicsCache& kin,
                        const VecX& qdot, MatX& jg, MatX& jg_dot) {
  const int n = model.dof();
  std::vector<Vec6> vel = propagate_velocity(model, kin, qdot);
  const Vec3 p_tip = kin.base_to_tip.offset();
  const Vec3 pdot_tip = kin.base_to_tip.rotation() *
                        tip_velocity(model, vel.back()).head<3>();

  jg.setZero(6, n);
  jg_dot.setZero(6, n);
  for (int i = 0; i < n; ++i) {
    const Mat3& r_i = kin.base_to_body[i].rotation();
    const Vec3 z = r_i * model.joints[i].axis;
    const Vec3 w_world = r_i * vel[i].tail<3>();
    const Vec3 zdot = w_world.cross(z);
    if (model.joints[i].type == JointType::Revolute) {
      const Vec3 p_i = kin.base_to_body[i].offset();
      const Vec3 pdot_i = r_i * vel[i].head<3>();
      const Vec3 arm = p_tip - p_i;
      jg.col(i).head<3>() = z.cross(arm);
      jg.col(i).tail<3>() = z;
      jg_dot.col(i).head<3>() = zdot.cross(arm) + z.cross(pdot_tip - pdot_i);
      jg_dot.col(i).tail<3>() = zdot;
    } else {
      jg.col(i).head<3>() = z;
      jg_dot.col(i).head<3>() = zdot;
    }
  }
}

namespace {

Mat3 euler_rate_matrix(double a, double b) {
  const double sa = std::sin(a), ca = std::cos(a);
  const double sb = std::sin(b), cb = std::cos(b);
  Mat3 m;
  m << 1.0, 0.0, sb,
       0.0, ca, -sa * cb,
       0.0, sa, ca * cb;
  return m;
}

Mat3 euler_rate_matrix_dot(double a, double b, double da, double db) {
  const double sa = std::sin(a), ca = std::cos(a);
  const double sb = std::sin(b), cb = std::cos(b);
  Mat3 m;
  m << 0.0, 0.0, cb * db,
       0.0, -sa * da, -ca * da * cb + sa * sb * db,
       0.0, ca * da, -sa * da * cb - ca * sb * db;
  return m;
}

}  // namespace

TaskJacobian task_jacobian(const ChainModel& model, const KinematicsCache& kin,
                           const VecX& qdot) {
  TaskJacobian out;
  MatX jg, jg_dot;
  geometric_jacobian(model, kin, qdot, jg, jg_dot);

  TipPose tp = tip_pose(kin.base_to_tip);
  out.pose = tp.pose;
  out.representation_singular = tp.singular;

  const double a = tp.pose(3);
  const double b = tp.pose(4);
  const Mat3 bmat = euler_rate_matrix(a, b);
  const Mat3 binv = bmat.inverse();

  out.J = jg;
  out.J.bottomRows(3) = binv * jg.bottomRows(3);

  const Vec3 euler_rates = out.J.bottomRows(3) * qdot;
  const Mat3 bdot =
      euler_rate_matrix_dot(a, b, euler_rates(0), euler_rates(1));
  out.Jdot = jg_dot;
  out.Jdot.bottomRows(3) =
      binv * jg_dot.bottomRows(3) - binv * bdot * binv * jg.bottomRows(3);
  return out;
}

MatX damped_pinv(const MatX& J, double sigma_threshold, double lambda) {
  Eigen::JacobiSVD<MatX> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VecX& sv = svd.singularValues();
  const double sigma_min = sv.size() > 0 ? sv(sv.size() - 1) : 0.0;
  const bool damped = sigma_min < sigma_threshold;
  VecX inv(sv.size());
  const double cutoff =
      std::max(J.rows(), J.cols()) *
      std::numeric_limits<double>::epsilon() * (sv.size() > 0 ? sv(0) : 0.0);
  for (int i = 0; i < sv.size(); ++i) {
    if (damped) {
      inv(i) = sv(i) / (sv(i) * sv(i) + lambda * lambda);
    } else {
      inv(i) = sv(i) > cutoff ? 1.0 / sv(i) : 0.0;
    }
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

}  // namespace vdcsim
