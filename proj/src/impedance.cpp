#include "vdcsim/impedance.hpp"

namespace vdcsim {

namespace {

void require_spd(const Mat6& m, const char* name) {
  if ((m - m.transpose()).norm() > 1e-9) {
    throw std::invalid_argument(std::string("ImpedanceSpec: ") + name +
                                " must be symmetric");
  }
  if (min_eigenvalue(m) <= 0.0) {
    throw std::invalid_argument(std::string("ImpedanceSpec: ") + name +
                                " must be positive definite");
  }
}

}  // namespace

void ImpedanceSpec::validate() const {
  require_spd(M_d, "M_d");
  require_spd(D_d, "D_d");
  require_spd(K_d, "K_d");
  Eigen::JacobiSVD<Mat6> svd(theta_psi);
  if (svd.singularValues().minCoeff() <=
      1e-12 * svd.singularValues().maxCoeff()) {
    throw std::invalid_argument("ImpedanceSpec: theta_psi must be nonsingular");
  }
  Eigen::EigenSolver<Mat6> es(Lambda);
  if (es.eigenvalues().real().maxCoeff() >= 0.0) {
    throw std::invalid_argument("ImpedanceSpec: Lambda must be Hurwitz");
  }
}

AllocatorGains derive_gains(const ImpedanceSpec& spec) {
  spec.validate();
  const Eigen::PartialPivLU<Mat6> lu_psi(spec.theta_psi);
  const Eigen::LLT<Mat6> llt_m(spec.M_d);
  const Mat6 m_inv_k = llt_m.solve(spec.K_d);
  const Mat6 m_inv_d = llt_m.solve(spec.D_d);
  const Mat6 m_inv = llt_m.solve(Mat6::Identity());
  AllocatorGains g;
  const Mat6 lam_sim = spec.theta_psi * spec.Lambda * lu_psi.inverse();
  g.Gamma_p = lu_psi.solve(m_inv_k + lam_sim * spec.theta_e);
  g.Gamma_v = lu_psi.solve(m_inv_d - spec.theta_e + lam_sim);
  g.Gamma_f = lu_psi.solve(m_inv);
  return g;
}

Vec6 psi_derivative(const ImpedanceSpec& spec, const AllocatorGains& gains,
                    const Vec6& psi, const Vec6& e_x, const Vec6& e_x_dot,
                    const Vec6& e_f) {
  return spec.Lambda * psi + gains.Gamma_p * e_x + gains.Gamma_v * e_x_dot +
         gains.Gamma_f * e_f;
}

Vec6 psi_step(const ImpedanceSpec& spec, const AllocatorGains& gains,
              const Vec6& psi, const Vec6& e_x, const Vec6& e_x_dot,
              const Vec6& e_f, double dt) {
  const Vec6 u =
      gains.Gamma_p * e_x + gains.Gamma_v * e_x_dot + gains.Gamma_f * e_f;
  const Vec6 k1 = spec.Lambda * psi + u;
  const Vec6 k2 = spec.Lambda * (psi + 0.5 * dt * k1) + u;
  const Vec6 k3 = spec.Lambda * (psi + 0.5 * dt * k2) + u;
  const Vec6 k4 = spec.Lambda * (psi + dt * k3) + u;
  return psi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Vec6 sliding_surface(const ImpedanceSpec& spec, const Vec6& e_x_dot,
                     const Vec6& e_x, const Vec6& psi) {
  return e_x_dot + spec.theta_e * e_x + spec.theta_psi * psi;
}

RequiredTask required_task(const ImpedanceSpec& spec,
                           const AllocatorGains& gains, const Vec6& psi,
                           const Vec6& e_x, const Vec6& e_x_dot,
                           const Vec6& e_f, const Vec6& xd_dot,
                           const Vec6& xd_ddot) {
  RequiredTask out;
  out.vel = xd_dot - spec.theta_e * e_x - spec.theta_psi * psi;
  out.psi_dot = psi_derivative(spec, gains, psi, e_x, e_x_dot, e_f);
  out.acc = xd_ddot - spec.theta_e * e_x_dot - spec.theta_psi * out.psi_dot;
  return out;
}

Vec6 first_order_required_velocity(const ImpedanceSpec& spec, const Vec6& e_x,
                                   const Vec6& e_f, const Vec6& xd_dot) {
  return xd_dot - spec.theta_e * e_x - spec.theta_psi * e_f;
}

RequiredJoint required_joint(const MatX& J, const MatX& Jdot,
                             const Vec6& vel_r, const Vec6& acc_r,
                             double sigma_threshold, double lambda) {
  const MatX pinv = damped_pinv(J, sigma_threshold, lambda);
  RequiredJoint out;
  out.qdot_r = pinv * vel_r;
  out.qddot_r = pinv * (acc_r - Jdot * out.qdot_r);
  return out;
}

}  // namespace vdcsim
