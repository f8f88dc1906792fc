#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Geometry>

#include "mahrs/quaternion.hpp"

namespace mahrs::test {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kDeg = kPi / 180.0;

inline Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec3 v;
  do {
    v = Vec3(n(rng), n(rng), n(rng));
  } while (v.norm() < 1e-3);
  return v.normalized();
}

// Uniform on S^3 (normalized 4D Gaussian).
inline UnitQuaternion random_quaternion(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  double w, x, y, z;
  do {
    w = n(rng), x = n(rng), y = n(rng), z = n(rng);
  } while (std::sqrt(w * w + x * x + y * y + z * z) < 1e-3);
  return {w, x, y, z};
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Rotation of angle in [0, max_angle] about a random axis.
inline UnitQuaternion random_deviation(std::mt19937_64& rng, double max_angle) {
  return axis_angle(random_unit(rng), uniform(rng, 0.0, max_angle));
}

// Independent rotation-matrix oracle.
inline Mat3 eigen_rotation(const UnitQuaternion& q) {
  return Eigen::Quaterniond(q.w(), q.vec().x(), q.vec().y(), q.vec().z()).toRotationMatrix();
}

}  // namespace mahrs::test
