#pragma once

#include "vdcsim/chain.hpp"
#include "vdcsim/spatial.hpp"

namespace vdcsim {

/// Target second-order contact behavior
///   M_d * dd(e_x) + D_d * d(e_x) + K_d * e_x = -e_f,
/// with e_x = X - X_d and e_f = F - F_d, F being the wrench the robot
/// applies to the environment. Also carries the allocator tuning: the filter
/// leak Lambda and the surface weights theta_e (position) and theta_psi
/// (filter state).
struct ImpedanceSpec {
  Mat6 M_d = Mat6::Identity();
  Mat6 D_d = Mat6::Identity();
  Mat6 K_d = Mat6::Identity();
  Mat6 Lambda = -Mat6::Identity();
  Mat6 theta_psi = Mat6::Identity();
  Mat6 theta_e = Mat6::Identity();

  /// M_d, D_d, K_d symmetric positive definite, theta_psi nonsingular,
  /// Lambda Hurwitz. Throws std::invalid_argument on failure.
  void validate() const;
};

/// Filter input gains that make the closed loop on the sliding surface
/// reproduce the target impedance exactly.
struct AllocatorGains {
  Mat6 Gamma_p = Mat6::Zero();
  Mat6 Gamma_v = Mat6::Zero();
  Mat6 Gamma_f = Mat6::Zero();
};

/// Solve the matching conditions
///   theta_psi * Gamma_f == inv(M_d)
///   theta_psi * Gamma_p == inv(M_d)*K_d + theta_psi*Lambda*inv(theta_psi)*theta_e
///   theta_psi * Gamma_v == inv(M_d)*D_d - theta_e + theta_psi*Lambda*inv(theta_psi)
/// for the filter gains. Throws std::invalid_argument on non-invertible
/// inputs.
AllocatorGains derive_gains(const ImpedanceSpec& spec);

/// Filter dynamics d(psi) = Lambda*psi + Gamma_p*e_x + Gamma_v*d(e_x)
///                          + Gamma_f*e_f.
Vec6 psi_derivative(const ImpedanceSpec& spec, const AllocatorGains& gains,
                    const Vec6& psi, const Vec6& e_x, const Vec6& e_x_dot,
                    const Vec6& e_f);

/// Advance the filter one step of length dt with the error inputs held
/// constant (classical RK4).
Vec6 psi_step(const ImpedanceSpec& spec, const AllocatorGains& gains,
              const Vec6& psi, const Vec6& e_x, const Vec6& e_x_dot,
              const Vec6& e_f, double dt);

/// Composite tracking variable  upsilon = d(e_x) + theta_e*e_x
///                                        + theta_psi*psi.
Vec6 sliding_surface(const ImpedanceSpec& spec, const Vec6& e_x_dot,
                     const Vec6& e_x, const Vec6& psi);

/// Task-space reference motion: the velocity whose tracking error is the
/// sliding surface, and its derivative.
struct RequiredTask {
  Vec6 vel = Vec6::Zero();
  Vec6 acc = Vec6::Zero();
  Vec6 psi_dot = Vec6::Zero();
};

RequiredTask required_task(const ImpedanceSpec& spec,
                           const AllocatorGains& gains, const Vec6& psi,
                           const Vec6& e_x, const Vec6& e_x_dot,
                           const Vec6& e_f, const Vec6& xd_dot,
                           const Vec6& xd_ddot);

/// Reference velocity of the reduced first-order allocation, where the force
/// error takes the filter state's place directly.
Vec6 first_order_required_velocity(const ImpedanceSpec& spec, const Vec6& e_x,
                                   const Vec6& e_f, const Vec6& xd_dot);

/// Joint-space reference rates through the (damped) Jacobian pseudo-inverse:
///   qdot_r  = pinv(J) * vel_r
///   qddot_r = pinv(J) * (acc_r - Jdot * qdot_r).
struct RequiredJoint {
  VecX qdot_r;
  VecX qddot_r;
};

RequiredJoint required_joint(const MatX& J, const MatX& Jdot,
                             const Vec6& vel_r, const Vec6& acc_r,
                             double sigma_threshold = 0.05,
                             double lambda = 0.01);

}  // namespace vdcsim
