#include "mahrs/charts.hpp"

#include <cmath>
#include <numbers>

#include "mahrs/errors.hpp"

namespace mahrs {

namespace {

// Half-angle below which the rotation-vector chart uses its series form.
constexpr double kSmallVec = 1e-12;

double image_radius(ChartKind kind) {
  switch (kind) {
    case ChartKind::Orthographic:
      return 2.0;
    case ChartKind::ModifiedRodriguesParams:
      return 4.0;
    case ChartKind::RotationVector:
      return std::numbers::pi;
    case ChartKind::RodriguesParams:
      break;
  }
  return INFINITY;
}

}  // namespace

std::string_view chart_name(ChartKind kind) {
  switch (kind) {
    case ChartKind::Orthographic:
      return "orthographic";
    case ChartKind::RodriguesParams:
      return "rodrigues";
    case ChartKind::ModifiedRodriguesParams:
      return "mrp";
    case ChartKind::RotationVector:
      return "rotation-vector";
  }
  return "?";
}

ChartKind parse_chart(std::string_view name) {
  for (ChartKind k : kAllCharts) {
    if (chart_name(k) == name) return k;
  }
  throw ConfigError("chart", "unknown chart '" + std::string(name) +
                                 "' (valid: orthographic, rodrigues, mrp, rotation-vector)");
}

Vec3 chart_forward(ChartKind kind, const UnitQuaternion& delta) {
  const UnitQuaternion d = delta.w() < 0 ? -delta : delta;
  const double d0 = d.w();
  const Vec3& dv = d.vec();
  switch (kind) {
    case ChartKind::Orthographic:
      return 2.0 * dv;
    case ChartKind::RodriguesParams:
      // d0 == 0 is a half turn, which sits at infinity in this chart.
      if (d0 <= 0.0) throw DomainError("rodrigues chart: half-turn deviation has no image");
      return 2.0 * dv / d0;
    case ChartKind::ModifiedRodriguesParams:
      return 4.0 * dv / (1.0 + d0);
    case ChartKind::RotationVector: {
      const double s = dv.norm();
      if (s < kSmallVec) return 2.0 * dv;
      return (2.0 * std::atan2(s, d0) / s) * dv;
    }
  }
  return Vec3::Zero();
}

UnitQuaternion chart_inverse(ChartKind kind, const Vec3& e) {
  if (!all_finite(e)) throw DomainError("chart_inverse: non-finite chart point");
  const double n2 = e.squaredNorm();
  switch (kind) {
    case ChartKind::Orthographic: {
      const double r2 = n2 / 4.0;
      if (r2 > 1.0) {
        throw DomainError("orthographic chart: |e| > 2 is outside the image (saturate first)");
      }
      return {std::sqrt(1.0 - r2), e / 2.0};
    }
    case ChartKind::RodriguesParams:
      return {2.0, e};
    case ChartKind::ModifiedRodriguesParams:
      return {(16.0 - n2) / (16.0 + n2), 8.0 * e / (16.0 + n2)};
    case ChartKind::RotationVector: {
      const double n = std::sqrt(n2);
      if (n < kSmallVec) return {1.0, e / 2.0};
      return {std::cos(n / 2.0), (std::sin(n / 2.0) / n) * e};
    }
  }
  return {};
}

Vec3 saturate(ChartKind kind, const Vec3& e_raw) {
  const double limit = image_radius(kind);
  if (!std::isfinite(limit)) return e_raw;
  const double n = e_raw.norm();
  const double bound = limit - kChartSaturationMargin;
  if (n <= bound) return e_raw;
  return e_raw * (bound / n);
}

UnitQuaternion centered_chart_inverse(const UnitQuaternion& qbar, ChartKind kind, const Vec3& e) {
  return qbar * chart_inverse(kind, e);
}

Vec3 centered_chart_forward(const UnitQuaternion& qbar, ChartKind kind, const UnitQuaternion& q) {
  return chart_forward(kind, conjugate(qbar) * q);
}

}  // namespace mahrs
