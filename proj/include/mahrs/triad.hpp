#pragma once

#include <string_view>

#include "mahrs/quaternion.hpp"

namespace mahrs {

/// Threshold on |z_a x z_m| below which two directions cannot span a frame.
inline constexpr double kTriadDegeneracyThreshold = 1e-6;

/// Orthonormal frame from an anchor direction and a secondary direction.
/// R = [c1 c2 c3] column-wise; c1 is the anchor exactly.
struct TriadFrame {
  Vec3 c1;
  Vec3 c2;
  Vec3 c3;
  RotationMatrix R;
};

/// Which TRIAD column stands in for the magnetometer in the filter.
enum class TriadColumn { C2, C3 };

std::string_view triad_column_name(TriadColumn c);
TriadColumn parse_triad_column(std::string_view name);

/// c1 = z_a, c2 = (z_a x z_m)/|z_a x z_m|, c3 = c1 x c2.
///
/// Only the part of z_m orthogonal to z_a survives, so any disturbance of z_m
/// along z_a (or within the plane of z_a and z_m) leaves c2 and c3 unchanged.
/// Inputs are normalized. Throws DegenerateGeometryError when
/// |z_a x z_m| <= kTriadDegeneracyThreshold.
TriadFrame triad(const Vec3& z_a, const Vec3& z_m);

/// The c3 column of triad(z_a, z_m): the vector the filter uses in place of
/// the magnetometer reading.
Vec3 triad_measurement(const Vec3& z_a, const Vec3& z_m);

/// The selected column of triad(z_a, z_m).
Vec3 triad_column(const Vec3& z_a, const Vec3& z_m, TriadColumn column);

}  // namespace mahrs
