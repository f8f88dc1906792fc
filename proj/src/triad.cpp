#include "mahrs/triad.hpp"

#include <string>

#include "mahrs/errors.hpp"

namespace mahrs {

std::string_view triad_column_name(TriadColumn c) { return c == TriadColumn::C2 ? "c2" : "c3"; }

TriadColumn parse_triad_column(std::string_view name) {
  if (name == "c2") return TriadColumn::C2;
  if (name == "c3") return TriadColumn::C3;
  throw ConfigError("triad_column", "unknown TRIAD column '" + std::string(name) + "' (valid: c2, c3)");
}

TriadFrame triad(const Vec3& z_a, const Vec3& z_m) {
  const Vec3 a = normalized_or_throw(z_a, "triad anchor");
  const Vec3 m = normalized_or_throw(z_m, "triad secondary");
  const Vec3 cross = a.cross(m);
  const double n = cross.norm();
  if (n <= kTriadDegeneracyThreshold) {
    throw DegenerateGeometryError("triad: vectors are parallel (|z_a x z_m| = " +
                                  std::to_string(n) + ")");
  }
  TriadFrame f;
  f.c1 = a;
  f.c2 = cross / n;
  f.c3 = f.c1.cross(f.c2);
  f.R.col(0) = f.c1;
  f.R.col(1) = f.c2;
  f.R.col(2) = f.c3;
  return f;
}

Vec3 triad_measurement(const Vec3& z_a, const Vec3& z_m) { return triad(z_a, z_m).c3; }

Vec3 triad_column(const Vec3& z_a, const Vec3& z_m, TriadColumn column) {
  const TriadFrame f = triad(z_a, z_m);
  return column == TriadColumn::C2 ? f.c2 : f.c3;
}

}  // namespace mahrs
