#include "mahrs/references.hpp"

#include <cmath>
#include <numbers>

#include "mahrs/errors.hpp"
#include "mahrs/triad.hpp"

namespace mahrs {

ReferenceVectors make_references(const Vec3& a_r, const Vec3& m_r) {
  const TriadFrame f = triad(a_r, m_r);
  return {f.c1, normalized_or_throw(m_r, "m_r"), f.c2, f.c3};
}

Vec3 field_from_inclination(double inclination_deg, double declination_deg) {
  const double inc = inclination_deg * std::numbers::pi / 180.0;
  const double dec = declination_deg * std::numbers::pi / 180.0;
  return {std::cos(inc) * std::cos(dec), std::cos(inc) * std::sin(dec), -std::sin(inc)};
}

}  // namespace mahrs
