#pragma once

#include "vdcsim/spatial.hpp"

namespace vdcsim {

/// 6x10 matrix mapping the inertial parameter vector to a body wrench.
using RegressorMatrix = Eigen::Matrix<double, 6, 10>;

/// Inertial description of one rigid body expressed in its own frame:
/// mass m, first moment h = m * com, and rotational inertia about the
/// frame origin.
///
/// The packed parameter vector is
///   phi = (m, hx, hy, hz, Ixx, Iyy, Izz, Ixy, Ixz, Iyz).
struct InertialParams {
  double mass = 0.0;
  Vec3 first_moment = Vec3::Zero();
  Mat3 rot_inertia = Mat3::Zero();

  Vec10 to_phi() const;
  static InertialParams from_phi(const Vec10& phi);

  Vec3 com() const { return first_moment / mass; }
};

/// Map inertial parameters to the 4x4 pseudo-inertia
///   [[0.5*tr(I)*1 - I, h], [h^T, m]].
/// The parameters are physically consistent exactly when this matrix is
/// positive definite.
Mat4 pseudo_inertia(const InertialParams& p);
Mat4 pseudo_inertia(const Vec10& phi);

/// Invert pseudo_inertia. Throws std::invalid_argument if the input is not
/// symmetric to within tol.
InertialParams params_from_pseudo_inertia(const Mat4& L, double tol = 1e-9);

/// Smallest eigenvalue of a symmetric matrix (self-adjoint solver).
double min_eigenvalue(const Eigen::Ref<const MatX>& sym);

/// True when the pseudo-inertia of p has all eigenvalues above tol.
bool physically_consistent(const InertialParams& p, double tol = 0.0);

/// 6x6 spatial mass matrix [[m*1, -skew(h)], [skew(h), I]] for
/// [linear; angular] stacking.
Mat6 spatial_mass_matrix(const InertialParams& p);

/// Velocity-product matrix C(V) built from the spatial momentum P = M*V:
///   C = [[0, -skew(f)], [-skew(f), -skew(n)]],  P = [f; n].
/// Antisymmetric by construction, and C(V)*V equals the Coriolis/centrifugal
/// bias of the body.
Mat6 velocity_product_matrix(const InertialParams& p, const Vec6& V);

/// Gravity term G = -[m*g; h x g] with g expressed in the body frame, so the
/// body equation reads  F = M*dV + C(V)*V + G  with F the net non-gravity
/// wrench applied to the body.
Vec6 gravity_wrench(const InertialParams& p, const Vec3& gravity_in_body);

struct BodyDynTerms {
  Mat6 M;
  Mat6 C;
  Vec6 G;
};

/// All three terms at once. Throws std::invalid_argument when the parameters
/// are not physically consistent.
BodyDynTerms dyn_terms(const InertialParams& p, const Vec6& V,
                       const Vec3& gravity_in_body);

/// Linear regressor Y with  Y(dV_r, V_r, V, g) * phi ==
/// M*dV_r + C(V)*V_r + G  for every parameter vector phi.
RegressorMatrix regressor(const Vec6& dV_r, const Vec6& V_r, const Vec6& V,
                          const Vec3& gravity_in_body);

/// 3x6 matrix L(x) with L(x) * (Ixx,Iyy,Izz,Ixy,Ixz,Iyz) == I * x.
Eigen::Matrix<double, 3, 6> inertia_vec_product(const Vec3& x);

}  // namespace vdcsim
