#pragma once

#include "vdcsim/adaptation.hpp"
#include "vdcsim/chain.hpp"
#include "vdcsim/impedance.hpp"

namespace vdcsim {

/// Net wrench a body must produce: regressor feedforward from the current
/// parameter estimate plus velocity-error feedback,
///   F* = Y_r * phi_hat + K * (V_r - V).
Vec6 required_net_force(const RegressorMatrix& Y_r, const Vec10& phi_hat,
                        const Mat6& K, const Vec6& V_r, const Vec6& V);

/// Virtual power flow through a cutting point, (V_r - V) . (F_r - F).
double virtual_power_flow(const Vec6& V_r, const Vec6& V, const Vec6& F_r,
                          const Vec6& F);

/// Frame- and kind-checked variant; all four vectors must live in the same
/// frame. Throws FrameError otherwise.
double virtual_power_flow(const SpatialVector& V_r, const SpatialVector& V,
                          const SpatialVector& F_r, const SpatialVector& F);

/// Contact stability measure S = upsilon . e_f with e_f = F - F_d; equals
/// -upsilon . (F_d - F), the product of the surface and the force shortfall.
double stability_function(const Vec6& upsilon, const Vec6& e_f);

/// Same measure written out in the surface components, as a consistency
/// cross-check: S = (-e_x_dot - theta_e*e_x - theta_psi*psi) . (F_d - F).
double stability_function_expanded(const ImpedanceSpec& spec,
                                   const Vec6& e_x_dot, const Vec6& e_x,
                                   const Vec6& psi, const Vec6& f_des_minus_f);

/// Trapezoid-integrated contact energy, split into the portion absorbed from
/// the port (positive power intervals) and the portion injected back
/// (negative ones); net == absorbed + injected by construction.
struct EnergyBreakdown {
  double net = 0.0;
  double absorbed = 0.0;
  double injected = 0.0;
};

EnergyBreakdown contact_energy(const std::vector<double>& force,
                               const std::vector<double>& velocity, double dt);

/// Choice of the required tip wrench fed to the inward force recursion:
/// the desired interaction wrench (the default), or the measured one.
enum class TipWrenchMode { Desired, Measured };

/// Full feedback law for one serial chain: impedance allocator in task
/// space, required-motion propagation through the chain, per-body force
/// composition, and joint torque extraction, with natural adaptation of the
/// body parameter estimates.
class VdcController {
 public:
  struct Options {
    std::vector<Mat6> K_body;
    double pinv_sigma_threshold = 0.05;
    double pinv_lambda = 0.01;
    bool adapt_enabled = true;
    TipWrenchMode tip_wrench_mode = TipWrenchMode::Desired;
  };

  struct Output {
    VecX tau;
    Vec6 pose = Vec6::Zero();
    Vec6 task_vel = Vec6::Zero();
    Vec6 e_x = Vec6::Zero();
    Vec6 e_x_dot = Vec6::Zero();
    Vec6 e_f = Vec6::Zero();
    Vec6 psi = Vec6::Zero();
    Vec6 upsilon = Vec6::Zero();
    Vec6 vel_r = Vec6::Zero();
    Vec6 acc_r = Vec6::Zero();
    VecX qdot_r;
    VecX qddot_r;
    std::vector<Vec6> body_vel;
    std::vector<Vec6> body_vel_r;
    std::vector<Vec6> body_acc_r;
    std::vector<Vec6> required_transmitted;
    std::vector<Vec10> eta;
    bool representation_singular = false;
  };

  VdcController(ChainModel model, ImpedanceSpec impedance, Options options,
                AdaptState adapt);

  /// Compute torques for the current measurements and advance the filter and
  /// the parameter estimates by dt. `f_task` is the wrench the chain applies
  /// to the environment, expressed in task coordinates.
  Output step(const VecX& q, const VecX& qdot, const Vec6& xd,
              const Vec6& xd_dot, const Vec6& xd_ddot, const Vec6& f_task,
              const Vec6& f_desired, double dt);

  const AdaptState& adapt() const { return adapt_; }
  const Vec6& psi() const { return psi_; }
  const AllocatorGains& gains() const { return gains_; }
  const ChainModel& model() const { return model_; }
  const ImpedanceSpec& impedance() const { return impedance_; }

  void reset_filter(const Vec6& psi) { psi_ = psi; }

 private:
  ChainModel model_;
  ImpedanceSpec impedance_;
  AllocatorGains gains_;
  Options options_;
  AdaptState adapt_;
  Vec6 psi_ = Vec6::Zero();
};

}  // namespace vdcsim
