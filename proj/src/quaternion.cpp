#include "mahrs/quaternion.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mahrs/errors.hpp"

namespace mahrs {

namespace {
constexpr double kMinNorm = 1e-12;
constexpr double kUnitAxisTol = 1e-9;
}  // namespace

UnitQuaternion::UnitQuaternion(double w, double x, double y, double z) {
  if (!std::isfinite(w) || !std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) {
    throw DomainError("quaternion has non-finite components");
  }
  const double n = std::sqrt(w * w + x * x + y * y + z * z);
  if (n < kMinNorm) {
    throw DomainError("quaternion has zero norm");
  }
  w_ = w / n;
  v_ = Vec3(x, y, z) / n;
}

UnitQuaternion UnitQuaternion::operator-() const {
  UnitQuaternion r;
  r.w_ = -w_;
  r.v_ = -v_;
  return r;
}

UnitQuaternion quat_product(const UnitQuaternion& a, const UnitQuaternion& b) {
  const double w = a.w() * b.w() - a.vec().dot(b.vec());
  const Vec3 v = a.w() * b.vec() + b.w() * a.vec() + a.vec().cross(b.vec());
  return {w, v};
}

UnitQuaternion conjugate(const UnitQuaternion& q) {
  UnitQuaternion r = -q;
  r.w_ = q.w_;
  return r;
}

RotationMatrix to_rotation_matrix(const UnitQuaternion& q) {
  const double w = q.w();
  const double x = q.vec().x();
  const double y = q.vec().y();
  const double z = q.vec().z();
  RotationMatrix r;
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return r;
}

Vec3 rotate(const UnitQuaternion& q, const Vec3& v) {
  // v + 2w (u x v) + 2 u x (u x v)
  const Vec3 t = 2.0 * q.vec().cross(v);
  return v + q.w() * t + q.vec().cross(t);
}

double rotation_error(const UnitQuaternion& a, const UnitQuaternion& b) {
  // Equal to 2 acos(|a . b|); the atan2 form keeps precision near zero where
  // acos of a value rounded to 1 collapses.
  // Components of conj(a) * b, unnormalized; swapping a and b negates v.
  const double w = a.dot(b);
  const Vec3 v = a.w() * b.vec() - b.w() * a.vec() - a.vec().cross(b.vec());
  return 2.0 * std::atan2(v.norm(), std::abs(w));
}

bool same_rotation(const UnitQuaternion& a, const UnitQuaternion& b, double tol) {
  return rotation_error(a, b) <= tol;
}

UnitQuaternion axis_angle(const Vec3& axis, double angle) {
  if (!all_finite(axis) || !std::isfinite(angle)) {
    throw DomainError("axis_angle: non-finite input");
  }
  if (std::abs(axis.norm() - 1.0) > kUnitAxisTol) {
    throw DomainError("axis_angle: axis is not unit length (norm " +
                      std::to_string(axis.norm()) + ")");
  }
  return {std::cos(angle / 2), axis * std::sin(angle / 2)};
}

Vec3 euler_zyx(const UnitQuaternion& q) {
  const double w = q.w();
  const double x = q.vec().x();
  const double y = q.vec().y();
  const double z = q.vec().z();
  const double yaw = std::atan2(2 * (w * z + x * y), 1 - 2 * (y * y + z * z));
  const double pitch = std::asin(std::clamp(2 * (w * y - z * x), -1.0, 1.0));
  const double roll = std::atan2(2 * (w * x + y * z), 1 - 2 * (x * x + y * y));
  return {yaw, pitch, roll};
}

Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0, -v.z(), v.y(),
      v.z(), 0, -v.x(),
      -v.y(), v.x(), 0;
  return m;
}

bool all_finite(const Vec3& v) {
  return std::isfinite(v.x()) && std::isfinite(v.y()) && std::isfinite(v.z());
}

Vec3 normalized_or_throw(const Vec3& v, const char* what) {
  if (!all_finite(v)) {
    throw DomainError(std::string(what) + ": non-finite vector");
  }
  const double n = v.norm();
  if (n < kMinNorm) {
    throw DomainError(std::string(what) + ": zero-length vector");
  }
  return v / n;
}

}  // namespace mahrs
