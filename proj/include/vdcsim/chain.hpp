#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "vdcsim/body_dynamics.hpp"
#include "vdcsim/spatial.hpp"

namespace vdcsim {

enum class JointType { Revolute, Prismatic };

/// One joint of a serial chain. The joint connects the parent frame (the
/// previous body frame, or the chain base) to this body's frame; `axis` is
/// the joint axis expressed in the child (body) frame, and the zero-pose
/// transform places the child frame in the parent at q = 0.
struct JointDesc {
  std::string name;
  JointType type = JointType::Revolute;
  Vec3 axis = Vec3::UnitZ();
  Mat3 zero_rotation = Mat3::Identity();
  Vec3 zero_offset = Vec3::Zero();
  double viscous_friction = 0.0;
  double limit_lower = -std::numeric_limits<double>::infinity();
  double limit_upper = std::numeric_limits<double>::infinity();

  /// Screw direction of the joint in child coordinates: [0; axis] for a
  /// revolute joint, [axis; 0] for a prismatic one.
  Vec6 screw() const;
};

/// Fixed-base serial chain. Body i sits between joints i and i+1 and owns
/// frame `body_frames[i]`; a fixed tip transform attaches the task frame to
/// the last body.
struct ChainModel {
  FrameId base_frame = "base";
  FrameId tip_frame = "tip";
  std::vector<std::string> body_frames;
  std::vector<JointDesc> joints;
  std::vector<InertialParams> bodies;
  Mat3 tip_rotation = Mat3::Identity();
  Vec3 tip_offset = Vec3::Zero();
  Vec3 gravity = Vec3(0.0, 0.0, -9.81);

  int dof() const { return static_cast<int>(joints.size()); }

  /// Structural checks: matching array sizes, unit axes, consistent body
  /// parameters, sane limits. Throws std::invalid_argument on failure.
  void validate() const;
};

struct ChainState {
  VecX q;
  VecX qdot;
};

/// Joint transforms and accumulated base-to-frame transforms at a given q.
struct KinematicsCache {
  std::vector<SpatialTransform> parent_to_child;
  std::vector<SpatialTransform> base_to_body;
  SpatialTransform base_to_tip;
};

KinematicsCache compute_kinematics(const ChainModel& model, const VecX& q);

/// Tip pose as [position; XYZ Euler angles] with the rotation factored
/// R = Rx(a) * Ry(b) * Rz(c). `singular` is set when |cos(b)| falls below
/// 1e-6 and the Euler rates are unusable.
struct TipPose {
  Vec6 pose;
  bool singular = false;
};

TipPose tip_pose(const SpatialTransform& base_to_tip);

/// Body-frame spatial velocities from base to tip for the given joint rates.
std::vector<Vec6> propagate_velocity(const ChainModel& model,
                                     const KinematicsCache& kin,
                                     const VecX& qdot);

/// Velocity of the tip frame given the last body's spatial velocity.
Vec6 tip_velocity(const ChainModel& model, const Vec6& last_body_velocity);

/// Velocities built from `qdot_used` together with their time derivatives.
/// The cross term of the acceleration recursion uses the actual joint rates
/// (the rates the frames really move with), so required accelerations are
/// obtained by passing qdot_used = reference rates, qdot_actual = measured
/// rates. With qdot_used == qdot_actual this is the ordinary recursion.
struct PropagatedMotion {
  std::vector<Vec6> vel;
  std::vector<Vec6> acc;
  Vec6 tip_vel = Vec6::Zero();
  Vec6 tip_acc = Vec6::Zero();
};

PropagatedMotion propagate_motion(const ChainModel& model,
                                  const KinematicsCache& kin,
                                  const VecX& qdot_used,
                                  const VecX& qdot_actual,
                                  const VecX& qddot);

/// Inward force recursion. `net_wrenches[i]` is the net wrench body i must
/// produce (in its own frame) and `tip_wrench` the wrench the chain applies
/// to the environment at the tip. Returns the wrench transmitted through
/// each joint, expressed in the corresponding body frame.
std::vector<Vec6> propagate_force(const ChainModel& model,
                                  const KinematicsCache& kin,
                                  const std::vector<Vec6>& net_wrenches,
                                  const Vec6& tip_wrench);

/// Screw projection of transmitted wrenches onto the joint axes.
VecX joint_projection(const ChainModel& model,
                      const std::vector<Vec6>& transmitted);

/// Joint torques that realize qddot under gravity, viscous friction and a
/// tip wrench applied to the environment.
VecX inverse_dynamics(const ChainModel& model, const VecX& q, const VecX& qdot,
                      const VecX& qddot, const Vec6& tip_wrench);

/// Joint-space inertia matrix via unit-acceleration sweeps.
MatX joint_space_inertia(const ChainModel& model, const KinematicsCache& kin);

/// Accelerations produced by torques tau with a tip wrench applied to the
/// environment.
VecX forward_dynamics(const ChainModel& model, const VecX& q, const VecX& qdot,
                      const VecX& tau, const Vec6& tip_wrench);

/// Task-space Jacobian of the tip pose (positions and XYZ Euler angles,
/// expressed in the base frame) plus its time derivative.
struct TaskJacobian {
  MatX J;
  MatX Jdot;
  Vec6 pose = Vec6::Zero();
  bool representation_singular = false;
};

TaskJacobian task_jacobian(const ChainModel& model, const KinematicsCache& kin,
                           const VecX& qdot);

/// Geometric (world-frame, tip-point) Jacobian and its derivative.
void geometric_jacobian(const ChainModel& model, const KinematicsCache& kin,
                        const VecX& qdot, MatX& Jg, MatX& Jg_dot);

/// Pseudo-inverse that switches to damped least squares (damping `lambda`)
/// when the smallest singular value drops below `sigma_threshold`.
MatX damped_pinv(const MatX& J, double sigma_threshold = 0.05,
                 double lambda = 0.01);

}  // namespace vdcsim
