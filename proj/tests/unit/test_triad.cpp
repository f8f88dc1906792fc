#include <gtest/gtest.h>

#include "mahrs/errors.hpp"
#include "mahrs/references.hpp"
#include "mahrs/triad.hpp"
#include "support.hpp"

using namespace mahrs;
using namespace mahrs::test;

namespace {

// Non-parallel pair: second vector at least ~6 deg away from the first.
std::pair<Vec3, Vec3> random_pair(std::mt19937_64& rng) {
  const Vec3 u = random_unit(rng);
  Vec3 v;
  do {
    v = random_unit(rng);
  } while (u.cross(v).norm() < 0.1);
  return {u, v};
}

}  // namespace

TEST(Triad, HandComputedFrame) {
  const TriadFrame f = triad(Vec3(0, 0, -1), Vec3(1, 0, 0));
  EXPECT_EQ(f.c1, Vec3(0, 0, -1));
  EXPECT_LT((f.c2 - Vec3(0, -1, 0)).norm(), 1e-15);
  EXPECT_LT((f.c3 - Vec3(-1, 0, 0)).norm(), 1e-15);
  EXPECT_NEAR(f.R.determinant(), 1.0, 1e-15);
  EXPECT_EQ(f.R.col(0), f.c1);
  EXPECT_EQ(f.R.col(1), f.c2);
  EXPECT_EQ(f.R.col(2), f.c3);
}

TEST(Triad, ReferenceFrameConsistency) {
  const ReferenceVectors refs = make_references(kDefaultGravityRef, Vec3(0.8775, 0, -0.4795));
  const TriadFrame f = triad(refs.a_r, refs.m_r);
  EXPECT_LT((f.c1 - refs.a_r).norm(), 1e-15);
  EXPECT_LT((f.c2 - refs.c2r).norm(), 1e-15);
  EXPECT_LT((f.c3 - refs.c3r).norm(), 1e-15);
  EXPECT_LT((triad_measurement(refs.a_r, refs.m_r) - refs.c3r).norm(), 1e-15);
  EXPECT_LT((triad_column(refs.a_r, refs.m_r, TriadColumn::C2) - refs.c2r).norm(), 1e-15);
}

TEST(Triad, NormalizesInputs) {
  const TriadFrame f = triad(Vec3(0, 0, -9.81), Vec3(30, 0, -16));
  EXPECT_LT((f.c1 - Vec3(0, 0, -1)).norm(), 1e-15);
}

TEST(Triad, DegenerateInputThrows) {
  EXPECT_THROW(triad(Vec3(0, 0, -1), Vec3(0, 0, -1)), DegenerateGeometryError);
  EXPECT_THROW(triad(Vec3(0, 0, -1), Vec3(1e-7, 0, 1)), DegenerateGeometryError);
  EXPECT_NO_THROW(triad(Vec3(0, 0, -1), Vec3(1e-5, 0, 1)));
}

TEST(Triad, ColumnNames) {
  EXPECT_EQ(parse_triad_column("c2"), TriadColumn::C2);
  EXPECT_EQ(parse_triad_column("c3"), TriadColumn::C3);
  EXPECT_EQ(triad_column_name(TriadColumn::C3), "c3");
  EXPECT_THROW(parse_triad_column("c1"), ConfigError);
}

TEST(TriadProperty, OrthonormalRightHanded) {
  std::mt19937_64 rng(30);
  for (int i = 0; i < 1000; ++i) {
    const auto [u, v] = random_pair(rng);
    const TriadFrame f = triad(u, v);
    EXPECT_LT((f.R.transpose() * f.R - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_NEAR(f.R.determinant(), 1.0, 1e-9);
  }
}

TEST(TriadProperty, Equivariance) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 1000; ++i) {
    const auto [u, v] = random_pair(rng);
    const Mat3 R = eigen_rotation(random_quaternion(rng));
    const Mat3 lhs = triad(R * u, R * v).R;
    const Mat3 rhs = R * triad(u, v).R;
    EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(TriadProperty, MeasurementEquivarianceAtTrueAttitude) {
  const ReferenceVectors refs = make_references(kDefaultGravityRef, Vec3(0.8775, 0, -0.4795));
  std::mt19937_64 rng(32);
  for (int i = 0; i < 1000; ++i) {
    const Mat3 Rt = eigen_rotation(random_quaternion(rng)).transpose();
    EXPECT_LT((triad_measurement(Rt * refs.a_r, Rt * refs.m_r) - Rt * refs.c3r).norm(), 1e-9);
  }
}

TEST(TriadProperty, AnchorExactness) {
  std::mt19937_64 rng(33);
  for (int i = 0; i < 1000; ++i) {
    const auto [u, v] = random_pair(rng);
    EXPECT_LT((triad(u, v).c1 - u).norm(), 1e-9);
  }
}

TEST(TriadProperty, AnchorDirectionDisturbanceRejected) {
  std::mt19937_64 rng(34);
  for (int i = 0; i < 1000; ++i) {
    const auto [u, v] = random_pair(rng);
    const double alpha = uniform(rng, -0.5, 0.5);
    const Vec3 disturbed = (v + alpha * u).normalized();
    EXPECT_LT((triad_measurement(u, disturbed) - triad_measurement(u, v)).norm(), 1e-9);
  }
}

TEST(TriadProperty, InPlaneRotationLeavesFrameUnchanged) {
  // Rotating z_m within the plane of z_a and z_m (without crossing z_a)
  // keeps every column.
  std::mt19937_64 rng(35);
  for (int i = 0; i < 1000; ++i) {
    const auto [u, v] = random_pair(rng);
    const Vec3 n = u.cross(v).normalized();
    const double angle_uv = std::atan2(u.cross(v).norm(), u.dot(v));
    const double beta = uniform(rng, -0.9, 0.9) * std::min(angle_uv, kPi - angle_uv);
    const Vec3 v2 = eigen_rotation(axis_angle(n, beta)) * v;
    const TriadFrame a = triad(u, v);
    const TriadFrame b = triad(u, v2);
    EXPECT_EQ(a.c1, b.c1);
    EXPECT_LT((a.c2 - b.c2).norm(), 1e-9);
    EXPECT_LT((a.c3 - b.c3).norm(), 1e-9);
  }
}
