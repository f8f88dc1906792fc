#pragma once

#include "mahrs/quaternion.hpp"

namespace mahrs {

/// Global-frame reference directions and the TRIAD references built from them.
///
/// {a_r, c2r, c3r} is a right-handed orthonormal frame with
/// c2r = (a_r x m_r) / |a_r x m_r| and c3r = a_r x c2r.
struct ReferenceVectors {
  Vec3 a_r;
  Vec3 m_r;
  Vec3 c2r;
  Vec3 c3r;
};

/// Gravity direction as seen by a static accelerometer, NED convention.
inline const Vec3 kDefaultGravityRef{0.0, 0.0, -1.0};

/// Normalizes both inputs and derives c2r, c3r. Throws DegenerateGeometryError
/// when a_r and m_r are (nearly) parallel.
ReferenceVectors make_references(const Vec3& a_r, const Vec3& m_r);

/// Earth-field direction for an inclination (positive downward) and a
/// declination, both in degrees, expressed with the same sign convention as
/// kDefaultGravityRef: (cos I cos D, cos I sin D, -sin I).
/// 28.65 deg inclination gives (0.8775, 0, -0.4795).
Vec3 field_from_inclination(double inclination_deg, double declination_deg);

}  // namespace mahrs
