#include "vdcsim/spatial.hpp"

namespace vdcsim {

Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

bool is_rotation(const Mat3& R, double tol) {
  return (R.transpose() * R - Mat3::Identity()).norm() <= tol &&
         R.determinant() > 0.0;
}

SpatialTransform::SpatialTransform()
    : rotation_(Mat3::Identity()), offset_(Vec3::Zero()) {}

SpatialTransform::SpatialTransform(const Mat3& rotation, const Vec3& offset,
                                   FrameId from, FrameId to)
    : rotation_(rotation),
      offset_(offset),
      from_(std::move(from)),
      to_(std::move(to)) {
  if (!is_rotation(rotation_)) {
    throw FrameError("SpatialTransform: rotation is not orthonormal (frame " +
                     from_ + " -> " + to_ + ")");
  }
}

Mat6 SpatialTransform::matrix() const {
  Mat6 u = Mat6::Zero();
  u.topLeftCorner<3, 3>() = rotation_;
  u.bottomLeftCorner<3, 3>() = skew(offset_) * rotation_;
  u.bottomRightCorner<3, 3>() = rotation_;
  return u;
}

SpatialTransform SpatialTransform::inverse() const {
  return SpatialTransform(rotation_.transpose(),
                          -(rotation_.transpose() * offset_), to_, from_);
}

SpatialTransform compose(const SpatialTransform& ab,
                         const SpatialTransform& bc) {
  if (ab.to() != bc.from()) {
    throw FrameError("compose: frame mismatch, " + ab.to() +
                     " != " + bc.from());
  }
  Mat3 r = ab.rotation() * bc.rotation();
  // Accumulated roundoff can drift the product off SO(3); re-orthonormalize
  // before the constructor's validity check rejects it.
  if (!is_rotation(r)) {
    Eigen::JacobiSVD<Mat3> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
    r = svd.matrixU() * svd.matrixV().transpose();
  }
  Vec3 t = ab.offset() + ab.rotation() * bc.offset();
  return SpatialTransform(r, t, ab.from(), bc.to());
}

Vec6 transform_velocity(const SpatialTransform& ab, const Vec6& v_a) {
  const Mat3& r = ab.rotation();
  Vec6 out;
  out.head<3>() =
      r.transpose() * (v_a.head<3>() - ab.offset().cross(v_a.tail<3>()));
  out.tail<3>() = r.transpose() * v_a.tail<3>();
  return out;
}

Vec6 transform_force(const SpatialTransform& ab, const Vec6& f_b) {
  const Mat3& r = ab.rotation();
  Vec6 out;
  out.head<3>() = r * f_b.head<3>();
  out.tail<3>() = ab.offset().cross(Vec3(r * f_b.head<3>())) + r * f_b.tail<3>();
  return out;
}

SpatialVector transform_velocity(const SpatialTransform& ab,
                                 const SpatialVector& v_a) {
  if (v_a.kind != VecKind::Velocity) {
    throw FrameError("transform_velocity: input is not a velocity");
  }
  if (v_a.frame != ab.from()) {
    throw FrameError("transform_velocity: vector in frame " + v_a.frame +
                     ", transform expects " + ab.from());
  }
  return SpatialVector(transform_velocity(ab, v_a.value), VecKind::Velocity,
                       ab.to());
}

SpatialVector transform_force(const SpatialTransform& ab,
                              const SpatialVector& f_b) {
  if (f_b.kind != VecKind::Force) {
    throw FrameError("transform_force: input is not a force");
  }
  if (f_b.frame != ab.to()) {
    throw FrameError("transform_force: vector in frame " + f_b.frame +
                     ", transform expects " + ab.to());
  }
  return SpatialVector(transform_force(ab, f_b.value), VecKind::Force,
                       ab.from());
}

Mat6 cross_motion(const Vec6& V) {
  Mat6 m = Mat6::Zero();
  Mat3 w = skew(V.tail<3>());
  m.topLeftCorner<3, 3>() = w;
  m.topRightCorner<3, 3>() = skew(V.head<3>());
  m.bottomRightCorner<3, 3>() = w;
  return m;
}

Mat6 cross_force(const Vec6& V) { return -cross_motion(V).transpose(); }

}  // namespace vdcsim
