#pragma once

#include <array>
#include <string>
#include <string_view>

#include "mahrs/quaternion.hpp"

namespace mahrs {

/// Local coordinates on the unit-quaternion manifold around the identity.
///
/// All four charts are scaled so that a deviation of angle theta about a unit
/// axis maps to approximately theta * axis near the origin, i.e. the vector
/// part of the inverse has Jacobian I/2 at e = 0. This is what lets the filter
/// use one measurement Jacobian for every chart.
enum class ChartKind {
  Orthographic,             // e = 2 dv
  RodriguesParams,          // e = 2 dv / d0
  ModifiedRodriguesParams,  // e = 4 dv / (1 + d0)
  RotationVector,           // e = 2 acos(d0) dv / |dv|
};

inline constexpr std::array<ChartKind, 4> kAllCharts = {
    ChartKind::Orthographic, ChartKind::RodriguesParams,
    ChartKind::ModifiedRodriguesParams, ChartKind::RotationVector};

/// Distance kept from a bounded chart's image boundary by saturate().
inline constexpr double kChartSaturationMargin = 1e-6;

/// CLI/config spelling: orthographic | rodrigues | mrp | rotation-vector.
std::string_view chart_name(ChartKind kind);

/// Parses a chart name; throws ConfigError listing the valid names.
ChartKind parse_chart(std::string_view name);

/// Chart coordinates of a deviation quaternion. The deviation is flipped to
/// the d0 >= 0 hemisphere first.
Vec3 chart_forward(ChartKind kind, const UnitQuaternion& delta);

/// Deviation quaternion for chart point e. Orthographic points with |e| > 2
/// have no preimage and raise DomainError; callers saturate first.
UnitQuaternion chart_inverse(ChartKind kind, const Vec3& e);

/// Radially clamps e into the chart's image (boundary minus the margin).
/// Images: Orthographic |e| <= 2, MRP |e| <= 4, rotation vector |e| <= pi,
/// Rodrigues unbounded.
Vec3 saturate(ChartKind kind, const Vec3& e_raw);

/// qbar * chart_inverse(kind, e).
UnitQuaternion centered_chart_inverse(const UnitQuaternion& qbar, ChartKind kind, const Vec3& e);

/// chart_forward(kind, qbar* * q).
Vec3 centered_chart_forward(const UnitQuaternion& qbar, ChartKind kind, const UnitQuaternion& q);

}  // namespace mahrs
