#pragma once

#include <Eigen/Dense>

namespace mahrs {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using RotationMatrix = Eigen::Matrix3d;

/// Unit quaternion, Hamilton convention (ijk = -1), scalar first.
///
/// Every constructor normalizes, so the norm stays within 1e-9 of one.
/// q and -q are distinct values but the same rotation; use same_rotation()
/// or rotation_error() when comparing attitudes.
class UnitQuaternion {
 public:
  UnitQuaternion() = default;

  /// Normalizes (w, x, y, z). Throws DomainError for non-finite or
  /// near-zero input.
  UnitQuaternion(double w, double x, double y, double z);
  UnitQuaternion(double w, const Vec3& v) : UnitQuaternion(w, v.x(), v.y(), v.z()) {}

  static UnitQuaternion identity() { return {}; }

  double w() const { return w_; }
  const Vec3& vec() const { return v_; }
  Eigen::Vector4d coeffs() const { return {w_, v_.x(), v_.y(), v_.z()}; }

  double dot(const UnitQuaternion& o) const { return w_ * o.w_ + v_.dot(o.v_); }

  UnitQuaternion operator-() const;

 private:
  friend UnitQuaternion conjugate(const UnitQuaternion& q);
  double w_ = 1.0;
  Vec3 v_ = Vec3::Zero();
};

/// Hamilton product, renormalized. R(a * b) = R(a) R(b).
UnitQuaternion quat_product(const UnitQuaternion& a, const UnitQuaternion& b);
inline UnitQuaternion operator*(const UnitQuaternion& a, const UnitQuaternion& b) {
  return quat_product(a, b);
}

UnitQuaternion conjugate(const UnitQuaternion& q);

/// Body-to-global rotation: R v equals the vector part of q (0,v) q*.
RotationMatrix to_rotation_matrix(const UnitQuaternion& q);

/// Rotates a body vector into the global frame.
Vec3 rotate(const UnitQuaternion& q, const Vec3& v);

/// Angle in [0, pi] between two attitudes, 2 acos(|a . b|).
double rotation_error(const UnitQuaternion& a, const UnitQuaternion& b);

/// True when a and b are the same rotation within `tol` radians.
bool same_rotation(const UnitQuaternion& a, const UnitQuaternion& b, double tol = 1e-9);

/// (cos(angle/2), axis sin(angle/2)). The axis must be unit within 1e-9.
UnitQuaternion axis_angle(const Vec3& axis, double angle);

/// Intrinsic Z-Y-X Euler angles (yaw, pitch, roll) in radians.
Vec3 euler_zyx(const UnitQuaternion& q);

/// Cross-product matrix: skew(v) * u == v.cross(u).
Mat3 skew(const Vec3& v);

bool all_finite(const Vec3& v);

/// Returns v / |v|; throws DomainError for non-finite or zero-length input.
Vec3 normalized_or_throw(const Vec3& v, const char* what);

}  // namespace mahrs
