#include "vdcsim/body_dynamics.hpp"

namespace vdcsim {

Vec10 InertialParams::to_phi() const {
  Vec10 phi;
  phi(0) = mass;
  phi.segment<3>(1) = first_moment;
  phi(4) = rot_inertia(0, 0);
  phi(5) = rot_inertia(1, 1);
  phi(6) = rot_inertia(2, 2);
  phi(7) = rot_inertia(0, 1);
  phi(8) = rot_inertia(0, 2);
  phi(9) = rot_inertia(1, 2);
  return phi;
}

InertialParams InertialParams::from_phi(const Vec10& phi) {
  InertialParams p;
  p.mass = phi(0);
  p.first_moment = phi.segment<3>(1);
  p.rot_inertia << phi(4), phi(7), phi(8),
                   phi(7), phi(5), phi(9),
                   phi(8), phi(9), phi(6);
  return p;
}

Mat4 pseudo_inertia(const InertialParams& p) {
  Mat4 L;
  L.topLeftCorner<3, 3>() =
      0.5 * p.rot_inertia.trace() * Mat3::Identity() - p.rot_inertia;
  L.topRightCorner<3, 1>() = p.first_moment;
  L.bottomLeftCorner<1, 3>() = p.first_moment.transpose();
  L(3, 3) = p.mass;
  return L;
}

Mat4 pseudo_inertia(const Vec10& phi) {
  return pseudo_inertia(InertialParams::from_phi(phi));
}

InertialParams params_from_pseudo_inertia(const Mat4& L, double tol) {
  if ((L - L.transpose()).norm() > tol) {
    throw std::invalid_argument(
        "params_from_pseudo_inertia: matrix is not symmetric");
  }
  Mat4 Ls = 0.5 * (L + L.transpose());
  InertialParams p;
  p.mass = Ls(3, 3);
  p.first_moment = Ls.topRightCorner<3, 1>();
  Mat3 sigma = Ls.topLeftCorner<3, 3>();
  p.rot_inertia = sigma.trace() * Mat3::Identity() - sigma;
  return p;
}

double min_eigenvalue(const Eigen::Ref<const MatX>& sym) {
  Eigen::SelfAdjointEigenSolver<MatX> es(sym);
  return es.eigenvalues().minCoeff();
}

bool physically_consistent(const InertialParams& p, double tol) {
  return min_eigenvalue(pseudo_inertia(p)) > tol;
}

Mat6 spatial_mass_matrix(const InertialParams& p) {
  Mat6 m = Mat6::Zero();
  m.topLeftCorner<3, 3>() = p.mass * Mat3::Identity();
  m.topRightCorner<3, 3>() = -skew(p.first_moment);
  m.bottomLeftCorner<3, 3>() = skew(p.first_moment);
  m.bottomRightCorner<3, 3>() = p.rot_inertia;
  return m;
}

Mat6 velocity_product_matrix(const InertialParams& p, const Vec6& V) {
  Vec6 momentum = spatial_mass_matrix(p) * V;
  Mat6 c = Mat6::Zero();
  Mat3 f = skew(momentum.head<3>());
  c.topRightCorner<3, 3>() = -f;
  c.bottomLeftCorner<3, 3>() = -f;
  c.bottomRightCorner<3, 3>() = -skew(momentum.tail<3>());
  return c;
}

Vec6 gravity_wrench(const InertialParams& p, const Vec3& g) {
  Vec6 gw;
  gw.head<3>() = -p.mass * g;
  gw.tail<3>() = -p.first_moment.cross(g);
  return gw;
}

BodyDynTerms dyn_terms(const InertialParams& p, const Vec6& V, const Vec3& g) {
  if (!physically_consistent(p)) {
    throw std::invalid_argument(
        "dyn_terms: inertial parameters are not physically consistent");
  }
  return {spatial_mass_matrix(p), velocity_product_matrix(p, V),
          gravity_wrench(p, g)};
}

Eigen::Matrix<double, 3, 6> inertia_vec_product(const Vec3& x) {
  Eigen::Matrix<double, 3, 6> l;
  l << x(0), 0.0, 0.0, x(1), x(2), 0.0,
       0.0, x(1), 0.0, x(0), 0.0, x(2),
       0.0, 0.0, x(2), 0.0, x(0), x(1);
  return l;
}

RegressorMatrix regressor(const Vec6& dV_r, const Vec6& V_r, const Vec6& V,
                          const Vec3& g) {
  const Vec3 al = dV_r.head<3>() - g;
  const Vec3 aa = dV_r.tail<3>();
  const Vec3 v = V.head<3>();
  const Vec3 w = V.tail<3>();
  const Vec3 v_r = V_r.head<3>();
  const Vec3 w_r = V_r.tail<3>();

  RegressorMatrix y = RegressorMatrix::Zero();
  y.block<3, 1>(0, 0) = al + w_r.cross(v);
  y.block<3, 3>(0, 1) = skew(aa) + skew(w_r) * skew(w);
  y.block<3, 1>(3, 0) = v_r.cross(v);
  y.block<3, 3>(3, 1) = -skew(al) + skew(v_r) * skew(w) - skew(w_r) * skew(v);
  y.block<3, 6>(3, 4) =
      inertia_vec_product(aa) + skew(w_r) * inertia_vec_product(w);
  return y;
}

}  // namespace vdcsim
