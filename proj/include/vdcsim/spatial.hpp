#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace vdcsim {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Vec10 = Eigen::Matrix<double, 10, 1>;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

using FrameId = std::string;

/// Error thrown when an operation mixes quantities from different frames
/// or receives a malformed rotation.
struct FrameError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Skew-symmetric matrix S(v) such that S(v)*w == v.cross(w).
Mat3 skew(const Vec3& v);

/// Kind tag for a 6-D spatial quantity. Velocities stack [linear; angular],
/// forces stack [force; moment].
enum class VecKind { Velocity, Force };

/// A 6-D spatial vector tagged with the frame it is expressed in.
struct SpatialVector {
  Vec6 value = Vec6::Zero();
  VecKind kind = VecKind::Velocity;
  FrameId frame;

  SpatialVector() = default;
  SpatialVector(const Vec6& v, VecKind k, FrameId f)
      : value(v), kind(k), frame(std::move(f)) {}

  Vec3 linear() const { return value.head<3>(); }
  Vec3 angular() const { return value.tail<3>(); }
};

/// Rigid transform between two named frames {A} (parent) and {B} (child),
/// stored as the rotation A_R_B and the offset A_r_AB expressed in {A}.
///
/// Velocities map child-ward (A -> B), forces map parent-ward (B -> A);
/// the pair keeps the instantaneous power v^T f invariant.
class SpatialTransform {
 public:
  SpatialTransform();
  SpatialTransform(const Mat3& rotation, const Vec3& offset, FrameId from,
                   FrameId to);

  static SpatialTransform Identity(const FrameId& frame) {
    return SpatialTransform(Mat3::Identity(), Vec3::Zero(), frame, frame);
  }

  const Mat3& rotation() const { return rotation_; }
  const Vec3& offset() const { return offset_; }
  const FrameId& from() const { return from_; }
  const FrameId& to() const { return to_; }

  /// The 6x6 force-transform matrix [[R, 0], [skew(r)R, R]].
  Mat6 matrix() const;

  /// Transform mapping {B} quantities back to {A} naming, i.e. B_R_A = R^T
  /// and B_r_BA = -R^T r.
  SpatialTransform inverse() const;

 private:
  Mat3 rotation_;
  Vec3 offset_;
  FrameId from_;
  FrameId to_;
};

/// Chain two transforms {A}->{B} and {B}->{C} into {A}->{C}.
/// Throws FrameError if ab.to() != bc.from().
SpatialTransform compose(const SpatialTransform& ab, const SpatialTransform& bc);

/// Map a spatial velocity expressed in the parent frame {A} into the child
/// frame {B}: B_v = U^T A_v. Throws FrameError on kind/frame mismatch.
SpatialVector transform_velocity(const SpatialTransform& ab,
                                 const SpatialVector& v_a);

/// Map a spatial force expressed in the child frame {B} into the parent
/// frame {A}: A_f = U B_f. Throws FrameError on kind/frame mismatch.
SpatialVector transform_force(const SpatialTransform& ab,
                              const SpatialVector& f_b);

/// Raw (untagged) versions used in inner loops.
Vec6 transform_velocity(const SpatialTransform& ab, const Vec6& v_a);
Vec6 transform_force(const SpatialTransform& ab, const Vec6& f_b);

/// Motion cross-product matrix for [linear; angular] stacking:
/// crm(V) * W is the spatial derivative coupling term, with
/// crm(V) = [[skew(w), skew(v)], [0, skew(w)]] for V = [v; w].
Mat6 cross_motion(const Vec6& V);

/// Force cross-product matrix, crf(V) = -crm(V)^T.
Mat6 cross_force(const Vec6& V);

/// Orthonormality check used when accepting external rotation matrices.
bool is_rotation(const Mat3& R, double tol = 1e-9);

}  // namespace vdcsim
