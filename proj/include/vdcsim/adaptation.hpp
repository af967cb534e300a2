#pragma once

#include <vector>

#include "vdcsim/body_dynamics.hpp"

namespace vdcsim {

/// Adaptation driving signal for one body: eta = Y_r^T (V_r - V).
Vec10 adaptation_signal(const RegressorMatrix& Y_r, const Vec6& V_r,
                        const Vec6& V);

/// The unique symmetric 4x4 matrix S satisfying
///   trace(S * pseudo_inertia(delta)) == eta . delta   for all delta,
/// obtained by solving a fixed 10x10 system over a symmetric basis.
Mat4 pseudo_inertia_dual(const Vec10& eta);

/// One discrete step of the natural adaptation law. The continuous flow
/// dL/dt = (1/gamma) * L * S * L is realized as the congruence
///   L+ = G^T L G,  G = I + dt/(2*gamma) * S * L,
/// which preserves symmetry and, for nonsingular G, positive definiteness.
/// If roundoff still drives an eigenvalue below `floor`, the result is
/// projected back (eigenvalues clamped) and *spd_projections is incremented.
Mat4 nal_step(const Mat4& L_hat, const Vec10& eta, double gamma, double dt,
              int* spd_projections = nullptr, double floor = 1e-10);

/// Per-body adaptation state.
struct AdaptState {
  std::vector<Mat4> L_hat;
  double gamma = 10.0;
  int spd_projections = 0;

  static AdaptState uniform(int n_bodies, double scale, double gamma);

  /// Parameter estimate of body i recovered from its pseudo-inertia.
  Vec10 phi_hat(int i) const;
};

/// Advance every body's estimate by one step.
void nal_update(AdaptState& state, const std::vector<Vec10>& etas, double dt);

/// Bregman divergence between SPD pseudo-inertia matrices,
///   d(L_true -> L_hat) = log(det L_hat / det L_true)
///                        + trace(L_hat^{-1} L_true) - 4.
/// Nonnegative, zero iff equal. Throws std::invalid_argument when either
/// argument is not SPD.
double bregman_divergence(const Mat4& L_true, const Mat4& L_hat);

}  // namespace vdcsim
