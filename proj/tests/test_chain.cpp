#include <doctest.h>

#include <cmath>

#include "test_util.hpp"
#include "vdcsim/chain.hpp"
#include "vdcsim/config.hpp"

using namespace vdcsim;
using namespace vdcsim::testutil;

namespace {

VecX random_q(std::mt19937_64& rng, int n, double lo = -1.2, double hi = 1.2) {
  VecX q(n);
  for (int i = 0; i < n; ++i) {
    q(i) = uniform(rng, lo, hi);
  }
  return q;
}

/// Base-frame position of body i's center of mass.
Vec3 com_in_base(const ChainModel& model, const KinematicsCache& kin, int i) {
  const SpatialTransform& x = kin.base_to_body[i];
  return x.rotation() * model.bodies[i].com() + x.offset();
}

double total_energy(const ChainModel& model, const VecX& q, const VecX& qd) {
  const KinematicsCache kin = compute_kinematics(model, q);
  const MatX h = joint_space_inertia(model, kin);
  double e = 0.5 * qd.dot(h * qd);
  for (int i = 0; i < model.dof(); ++i) {
    e -= model.bodies[i].mass * model.gravity.dot(com_in_base(model, kin, i));
  }
  return e;
}

}  // namespace

TEST_CASE("screw directions by joint type") {
  JointDesc j;
  j.axis = Vec3::UnitY();
  j.type = JointType::Revolute;
  Vec6 s = j.screw();
  CHECK(s.head<3>().norm() == 0.0);
  CHECK((s.tail<3>() - Vec3::UnitY()).norm() == 0.0);
  j.type = JointType::Prismatic;
  s = j.screw();
  CHECK((s.head<3>() - Vec3::UnitY()).norm() == 0.0);
  CHECK(s.tail<3>().norm() == 0.0);
}

TEST_CASE("planar chain forward kinematics against the analytic reach") {
  const ChainModel model = planar_3r_model();
  const VecX q = planar_3r_home();
  const KinematicsCache kin = compute_kinematics(model, q);
  const TipPose tip = tip_pose(kin.base_to_tip);

  // Link lengths are encoded as the x offsets of the next joint / tip.
  const double lengths[3] = {model.joints[1].zero_offset(0),
                             model.joints[2].zero_offset(0),
                             model.tip_offset(0)};
  double cum = 0.0, x = 0.0, y = 0.0;
  for (int i = 0; i < 3; ++i) {
    cum += q(i);
    x += lengths[i] * std::cos(cum);
    y += lengths[i] * std::sin(cum);
  }
  CHECK(tip.pose(0) == doctest::Approx(x).epsilon(1e-12));
  CHECK(tip.pose(1) == doctest::Approx(y).epsilon(1e-12));
  CHECK(tip.pose(2) == doctest::Approx(0.0));
  // Pure yaw: the XYZ Euler factorization puts the whole angle in the last
  // slot.
  CHECK(tip.pose(3) == doctest::Approx(0.0));
  CHECK(tip.pose(4) == doctest::Approx(0.0));
  CHECK(tip.pose(5) == doctest::Approx(cum).epsilon(1e-12));
  CHECK_FALSE(tip.singular);
}

TEST_CASE("task jacobian matches finite differences of the pose") {
  const ChainModel model = planar_3r_model();
  auto rng = make_rng(501);
  const double h = 1e-5;
  for (int trial = 0; trial < 10; ++trial) {
    const VecX q = random_q(rng, 3);
    const VecX qd = random_q(rng, 3, -0.8, 0.8);
    const TaskJacobian tj =
        task_jacobian(model, compute_kinematics(model, q), qd);
    REQUIRE_FALSE(tj.representation_singular);

    for (int c = 0; c < 3; ++c) {
      VecX qp = q, qm = q;
      qp(c) += h;
      qm(c) -= h;
      const Vec6 pp = tip_pose(compute_kinematics(model, qp).base_to_tip).pose;
      const Vec6 pm = tip_pose(compute_kinematics(model, qm).base_to_tip).pose;
      const Vec6 fd = (pp - pm) / (2.0 * h);
      CHECK((tj.J.col(c) - fd).lpNorm<Eigen::Infinity>() < 1e-6);
    }

    // dJ/dt by differencing J along the motion direction.
    VecX qp = q + h * qd;
    VecX qm = q - h * qd;
    const MatX jp = task_jacobian(model, compute_kinematics(model, qp), qd).J;
    const MatX jm = task_jacobian(model, compute_kinematics(model, qm), qd).J;
    const MatX fd_jdot = (jp - jm) / (2.0 * h);
    CHECK((tj.Jdot - fd_jdot).lpNorm<Eigen::Infinity>() < 1e-5);

    // Velocity propagated through the chain agrees with J * qd.
    const KinematicsCache kin = compute_kinematics(model, q);
    const std::vector<Vec6> vels = propagate_velocity(model, kin, qd);
    const Vec6 tip_vel_pose = tj.J * qd;
    const Vec6 tip_v = tip_velocity(model, vels.back());
    // The linear part of the tip twist, rotated to base coordinates, must
    // match the positional pose rates.
    const Vec3 lin_base = kin.base_to_tip.rotation() * tip_v.head<3>();
    CHECK((tip_vel_pose.head<3>() - lin_base).norm() < 1e-10);
  }
}

TEST_CASE("inverse and forward dynamics are mutual inverses") {
  const ChainModel model = planar_3r_model();
  auto rng = make_rng(502);
  for (int trial = 0; trial < 20; ++trial) {
    const VecX q = random_q(rng, 3);
    const VecX qd = random_q(rng, 3, -1.0, 1.0);
    const VecX qdd = random_q(rng, 3, -3.0, 3.0);
    const Vec6 tip_wrench = random_vec6(rng, -5.0, 5.0);
    const VecX tau = inverse_dynamics(model, q, qd, qdd, tip_wrench);
    const VecX qdd_back = forward_dynamics(model, q, qd, tau, tip_wrench);
    CHECK((qdd_back - qdd).lpNorm<Eigen::Infinity>() < 1e-8);
  }
}

TEST_CASE("joint-space inertia equals the spatial kinetic-energy metric") {
  const ChainModel model = planar_3r_model();
  auto rng = make_rng(503);
  const VecX q = random_q(rng, 3);
  const VecX qd = random_q(rng, 3);
  const KinematicsCache kin = compute_kinematics(model, q);
  const MatX h = joint_space_inertia(model, kin);
  CHECK((h - h.transpose()).norm() < 1e-10);
  CHECK(h.ldlt().isPositive());

  const std::vector<Vec6> vels = propagate_velocity(model, kin, qd);
  double ke_spatial = 0.0;
  for (int i = 0; i < model.dof(); ++i) {
    ke_spatial += 0.5 * vels[i].dot(spatial_mass_matrix(model.bodies[i]) *
                                    vels[i]);
  }
  CHECK(0.5 * qd.dot(h * qd) == doctest::Approx(ke_spatial).epsilon(1e-10));
}

TEST_CASE("zero gravity, zero rates, zero torque is an equilibrium") {
  ChainModel model = planar_3r_model();
  model.gravity.setZero();
  auto rng = make_rng(504);
  const VecX q = random_q(rng, 3);
  const VecX zero = VecX::Zero(3);
  const VecX tau = inverse_dynamics(model, q, zero, zero, Vec6::Zero());
  CHECK(tau.lpNorm<Eigen::Infinity>() < 1e-12);
  const VecX qdd = forward_dynamics(model, q, zero, zero, Vec6::Zero());
  CHECK(qdd.lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("unforced frictionless swing conserves mechanical energy") {
  ChainModel model = planar_3r_model();
  for (JointDesc& j : model.joints) {
    j.viscous_friction = 0.0;
  }
  // Tip gravity into the joint plane so it actually loads the joints.
  model.gravity = Vec3(0.0, -9.81, 0.0);

  VecX q = planar_3r_home();
  VecX qd = VecX::Zero(3);
  const double e0 = total_energy(model, q, qd);
  const double dt = 1e-3;
  const VecX tau = VecX::Zero(3);
  double max_drift = 0.0;
  for (int k = 0; k < 5000; ++k) {
    const VecX a1 = forward_dynamics(model, q, qd, tau, Vec6::Zero());
    const VecX k1q = qd;
    const VecX k2q = qd + 0.5 * dt * a1;
    const VecX a2 =
        forward_dynamics(model, q + 0.5 * dt * k1q, k2q, tau, Vec6::Zero());
    const VecX k3q = qd + 0.5 * dt * a2;
    const VecX a3 =
        forward_dynamics(model, q + 0.5 * dt * k2q, k3q, tau, Vec6::Zero());
    const VecX k4q = qd + dt * a3;
    const VecX a4 = forward_dynamics(model, q + dt * k3q, k4q, tau, Vec6::Zero());
    q += (dt / 6.0) * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
    qd += (dt / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
    max_drift = std::max(max_drift, std::abs(total_energy(model, q, qd) - e0));
  }
  CHECK(max_drift < 1e-4);
}

TEST_CASE("force recursion is consistent with inverse dynamics") {
  const ChainModel model = planar_3r_model();
  auto rng = make_rng(505);
  const VecX q = random_q(rng, 3);
  const VecX qd = random_q(rng, 3);
  const VecX qdd = random_q(rng, 3);
  const Vec6 tip_wrench = random_vec6(rng);

  const KinematicsCache kin = compute_kinematics(model, q);
  const PropagatedMotion pm = propagate_motion(model, kin, qd, qd, qdd);
  std::vector<Vec6> net(model.dof());
  for (int i = 0; i < model.dof(); ++i) {
    const Vec3 g_body =
        kin.base_to_body[i].rotation().transpose() * model.gravity;
    const BodyDynTerms terms = dyn_terms(model.bodies[i], pm.vel[i], g_body);
    net[i] = terms.M * pm.acc[i] + terms.C * pm.vel[i] + terms.G;
  }
  const std::vector<Vec6> transmitted =
      propagate_force(model, kin, net, tip_wrench);
  VecX tau = joint_projection(model, transmitted);
  for (int i = 0; i < model.dof(); ++i) {
    tau(i) += model.joints[i].viscous_friction * qd(i);
  }
  const VecX tau_id = inverse_dynamics(model, q, qd, qdd, tip_wrench);
  CHECK((tau - tau_id).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("damped pseudo-inverse: exact when healthy, bounded when singular") {
  auto rng = make_rng(506);
  MatX j = MatX::Zero(6, 3);
  for (int r = 0; r < 6; ++r) {
    for (int c = 0; c < 3; ++c) {
      j(r, c) = uniform(rng);
    }
  }
  const MatX pinv = damped_pinv(j, 0.05, 0.01);
  CHECK((pinv * j - MatX::Identity(3, 3)).norm() < 1e-10);

  MatX rank1 = MatX::Zero(6, 3);
  rank1.col(0).setOnes();
  rank1.col(1) = rank1.col(0);  // exactly dependent columns
  const MatX dp = damped_pinv(rank1, 0.05, 0.01);
  CHECK(dp.allFinite());
  CHECK(dp.norm() < 1e3);
}

TEST_CASE("model validation catches structural mistakes") {
  ChainModel model = planar_3r_model();
  CHECK_NOTHROW(model.validate());

  ChainModel bad = model;
  bad.joints[1].axis = Vec3::Zero();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = model;
  bad.bodies.pop_back();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = model;
  bad.joints[0].limit_lower = 2.0;
  bad.joints[0].limit_upper = -2.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
