#include "vdcsim/adaptation.hpp"

#include <array>
#include <cmath>

namespace vdcsim {

Vec10 adaptation_signal(const RegressorMatrix& Y_r, const Vec6& V_r,
                        const Vec6& V) {
  return Y_r.transpose() * (V_r - V);
}

namespace {

std::array<Mat4, 10> symmetric_basis() {
  std::array<Mat4, 10> basis;
  int k = 0;
  for (int i = 0; i < 4; ++i) {
    Mat4 b = Mat4::Zero();
    b(i, i) = 1.0;
    basis[k++] = b;
  }
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      Mat4 b = Mat4::Zero();
      b(i, j) = 1.0;
      b(j, i) = 1.0;
      basis[k++] = b;
    }
  }
  return basis;
}

struct DualSolver {
  std::array<Mat4, 10> basis;
  Eigen::PartialPivLU<Eigen::Matrix<double, 10, 10>> lu;

  DualSolver() : basis(symmetric_basis()) {
    Eigen::Matrix<double, 10, 10> a;
    for (int j = 0; j < 10; ++j) {
      Vec10 ej = Vec10::Zero();
      ej(j) = 1.0;
      const Mat4 lj = pseudo_inertia(ej);
      for (int k = 0; k < 10; ++k) {
        a(j, k) = (basis[k] * lj).trace();
      }
    }
    lu.compute(a);
  }
};

const DualSolver& dual_solver() {
  static const DualSolver solver;
  return solver;
}

}  // namespace

Mat4 pseudo_inertia_dual(const Vec10& eta) {
  const DualSolver& ds = dual_solver();
  const Vec10 c = ds.lu.solve(eta);
  Mat4 s = Mat4::Zero();
  for (int k = 0; k < 10; ++k) {
    s += c(k) * ds.basis[k];
  }
  return s;
}

Mat4 nal_step(const Mat4& L_hat, const Vec10& eta, double gamma, double dt,
              int* spd_projections, double floor) {
  const Mat4 s = pseudo_inertia_dual(eta);
  const Mat4 g = Mat4::Identity() + (dt / (2.0 * gamma)) * s * L_hat;
  Mat4 next = g.transpose() * L_hat * g;
  next = 0.5 * (next + next.transpose());
  Eigen::SelfAdjointEigenSolver<Mat4> es(next);
  if (es.eigenvalues().minCoeff() <= floor) {
    Vec4 clamped = es.eigenvalues().cwiseMax(floor);
    next = es.eigenvectors() * clamped.asDiagonal() *
           es.eigenvectors().transpose();
    next = 0.5 * (next + next.transpose());
    if (spd_projections != nullptr) {
      ++(*spd_projections);
    }
  }
  return next;
}

AdaptState AdaptState::uniform(int n_bodies, double scale, double gamma) {
  AdaptState st;
  st.L_hat.assign(n_bodies, scale * Mat4::Identity());
  st.gamma = gamma;
  return st;
}

Vec10 AdaptState::phi_hat(int i) const {
  return params_from_pseudo_inertia(L_hat[i]).to_phi();
}

void nal_update(AdaptState& state, const std::vector<Vec10>& etas, double dt) {
  if (etas.size() != state.L_hat.size()) {
    throw std::invalid_argument("nal_update: wrong signal count");
  }
  for (size_t i = 0; i < etas.size(); ++i) {
    state.L_hat[i] =
        nal_step(state.L_hat[i], etas[i], state.gamma, dt, &state.spd_projections);
  }
}

double bregman_divergence(const Mat4& L_true, const Mat4& L_hat) {
  Eigen::LLT<Mat4> llt_true(L_true), llt_hat(L_hat);
  if (llt_true.info() != Eigen::Success || llt_hat.info() != Eigen::Success) {
    throw std::invalid_argument("bregman_divergence: arguments must be SPD");
  }
  auto logdet = [](const Eigen::LLT<Mat4>& llt) {
    return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  };
  const double trace_term = llt_hat.solve(L_true).trace();
  return logdet(llt_hat) - logdet(llt_true) + trace_term - 4.0;
}

}  // namespace vdcsim
