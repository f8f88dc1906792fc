#include <gtest/gtest.h>

#include "mahrs/errors.hpp"
#include "mahrs/mekf.hpp"
#include "support.hpp"

using namespace mahrs;
using namespace mahrs::test;

namespace {

const ReferenceVectors kRefs = make_references(kDefaultGravityRef, Vec3(0.8775, 0.0, -0.4795));

Measurement exact_measurement(double t, const UnitQuaternion& q, const Vec3& omega, const ReferenceVectors& refs) {
  const Mat3 Rt = eigen_rotation(q).transpose();
  return Measurement::make(t, omega, Rt * refs.a_r, Rt * refs.m_r);
}

Mat6 random_spd(std::mt19937_64& rng, double scale) {
  Eigen::Matrix<double, 6, 6> A;
  for (int i = 0; i < 36; ++i) A.data()[i] = uniform(rng, -1.0, 1.0);
  return scale * (A * A.transpose() + 0.1 * Mat6::Identity());
}

}  // namespace

TEST(Noise, PaperDefaults) {
  const NoiseParams n;
  EXPECT_EQ(n.Q_omega, 10.0 * Mat3::Identity());
  EXPECT_EQ(n.R_omega, 0.001 * Mat3::Identity());
  EXPECT_EQ(n.R_a, 0.01 * Mat3::Identity());
  EXPECT_EQ(n.R_m, 0.01 * Mat3::Identity());
  EXPECT_NO_THROW(n.validate());
  NoiseParams bad;
  bad.R_a(0, 1) = 1.0;
  EXPECT_THROW(bad.validate(), DomainError);
  bad = NoiseParams{};
  bad.Q_omega = -Mat3::Identity();
  EXPECT_THROW(bad.validate(), DomainError);
}

TEST(Measurement, MakeNormalizes) {
  const Measurement m = Measurement::make(0.0, Vec3::Zero(), Vec3(0, 0, -9.81), Vec3(3, 0, 4));
  EXPECT_NEAR(m.z_a.norm(), 1.0, 1e-15);
  EXPECT_NEAR(m.z_m->norm(), 1.0, 1e-15);
  EXPECT_THROW(Measurement::make(0.0, Vec3::Zero(), Vec3::Zero(), std::nullopt), DomainError);
  EXPECT_THROW(Measurement::make(0.0, Vec3(NAN, 0, 0), Vec3::UnitZ(), std::nullopt), DomainError);
}

TEST(InitState, AcceptsValidRejectsBadP0) {
  std::mt19937_64 rng(40);
  for (ChartKind k : kAllCharts) {
    const UnitQuaternion q0 = random_quaternion(rng);
    const FilterState s = init_state(k, q0, Vec3::Zero(), 0.1 * Mat6::Identity());
    EXPECT_EQ(s.chart, k);
    EXPECT_EQ(s.e_mean, Vec3::Zero());
    EXPECT_EQ(s.qbar.coeffs(), q0.coeffs());
  }
  Mat6 asym = 0.1 * Mat6::Identity();
  asym(0, 1) = 0.05;
  EXPECT_THROW(init_state(ChartKind::ModifiedRodriguesParams, {}, Vec3::Zero(), asym), DomainError);
  EXPECT_THROW(init_state(ChartKind::ModifiedRodriguesParams, {}, Vec3::Zero(), -Mat6::Identity()), DomainError);
}

TEST(Predict, ZeroRateKeepsAttitudeAndAddsProcessNoise) {
  const NoiseParams n;
  const double dt = 0.002;
  const FilterState s = init_state(ChartKind::ModifiedRodriguesParams, axis_angle(Vec3::UnitY(), 0.4), Vec3::Zero(),
                                   0.1 * Mat6::Identity());
  const FilterState p = predict(s, n, dt);
  EXPECT_EQ(p.qbar.coeffs(), s.qbar.coeffs());
  // Oracle F and Q_n written out directly.
  Mat6 F = Mat6::Identity();
  F.topRightCorner<3, 3>() = dt * Mat3::Identity();
  Mat6 Q = Mat6::Zero();
  Q.topLeftCorner<3, 3>() = 10.0 * dt * dt * dt / 3.0 * Mat3::Identity();
  Q.topRightCorner<3, 3>() = -10.0 * dt * dt / 2.0 * Mat3::Identity();
  Q.bottomLeftCorner<3, 3>() = -10.0 * dt * dt / 2.0 * Mat3::Identity();
  Q.bottomRightCorner<3, 3>() = 10.0 * dt * Mat3::Identity();
  EXPECT_LT((p.P - F * (s.P + Q) * F.transpose()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Predict, ConstantRateHalfTurnClosedForm) {
  const UnitQuaternion q0 = axis_angle(Vec3(1, 0, 0), 0.3);
  const FilterState s = init_state(ChartKind::RotationVector, q0, Vec3(0, 0, kPi), Mat6::Zero());
  const FilterState p = predict(s, NoiseParams{}, 0.5);
  EXPECT_LT(rotation_error(p.qbar, q0 * axis_angle(Vec3::UnitZ(), kPi / 2)), 1e-12);
  EXPECT_EQ(p.omega_mean, Vec3(0, 0, kPi));
}

TEST(Predict, RateBlockFromZeroCovariance) {
  const double q = 3.0;
  const double dt = 0.01;
  const FilterState s = init_state(ChartKind::Orthographic, {}, Vec3::Zero(), Mat6::Zero());
  const FilterState p = predict(s, NoiseParams::isotropic(q, 0.001, 0.01, 0.01), dt);
  EXPECT_LT((p.P.bottomRightCorner<3, 3>() - q * dt * Mat3::Identity()).norm(), 1e-15);
}

TEST(Predict, RejectsBadDt) {
  const FilterState s = init_state(ChartKind::Orthographic, {}, Vec3::Zero(), Mat6::Identity());
  EXPECT_THROW(predict(s, NoiseParams{}, 0.0), DomainError);
  EXPECT_THROW(predict(s, NoiseParams{}, -0.01), DomainError);
  EXPECT_THROW(predict(s, NoiseParams{}, 1.5), DomainError);
  EXPECT_NO_THROW(predict(s, NoiseParams{}, 1.0));
}

TEST(PredictMeasurement, Examples) {
  FilterState s = init_state(ChartKind::ModifiedRodriguesParams, {}, Vec3(0.1, 0.2, 0.3), Mat6::Identity());
  const Eigen::VectorXd z1 = predict_measurement(s, kRefs, MeasurementMode::Ekf1);
  ASSERT_EQ(z1.size(), 6);
  EXPECT_EQ(Vec3(z1.head<3>()), Vec3(0, 0, -1));
  EXPECT_EQ(Vec3(z1.tail<3>()), Vec3(0.1, 0.2, 0.3));

  const Eigen::VectorXd z2 = predict_measurement(s, kRefs, MeasurementMode::Ekf2);
  ASSERT_EQ(z2.size(), 9);
  EXPECT_LT((Vec3(z2.head<3>()) - Vec3(0.8775, 0, -0.4795)).norm(), 1e-4);

  const Eigen::VectorXd zt = predict_measurement(s, kRefs, MeasurementMode::Ekf2Triad);
  EXPECT_EQ(Vec3(zt.head<3>()), kRefs.c3r);
  const Eigen::VectorXd zc2 = predict_measurement(s, kRefs, MeasurementMode::Ekf2Triad, TriadColumn::C2);
  EXPECT_EQ(Vec3(zc2.head<3>()), kRefs.c2r);

  s.qbar = axis_angle(Vec3::UnitY(), kPi / 2);
  const Eigen::VectorXd zy = predict_measurement(s, kRefs, MeasurementMode::Ekf1);
  EXPECT_LT((Vec3(zy.head<3>()) - eigen_rotation(s.qbar).transpose() * kRefs.a_r).norm(), 1e-15);
}

TEST(MeasurementNoise, BlockDiagonalLayout) {
  NoiseParams n = NoiseParams::isotropic(10, 0.001, 0.02, 0.05);
  const Eigen::MatrixXd R1 = measurement_noise(n, MeasurementMode::Ekf1);
  ASSERT_EQ(R1.rows(), 6);
  EXPECT_DOUBLE_EQ(R1(0, 0), 0.02);
  EXPECT_DOUBLE_EQ(R1(5, 5), 0.001);
  const Eigen::MatrixXd R2 = measurement_noise(n, MeasurementMode::Ekf2);
  ASSERT_EQ(R2.rows(), 9);
  EXPECT_DOUBLE_EQ(R2(0, 0), 0.05);
  EXPECT_DOUBLE_EQ(R2(3, 3), 0.02);
  EXPECT_DOUBLE_EQ(R2(8, 8), 0.001);
  EXPECT_DOUBLE_EQ(R2(0, 3), 0.0);
}

TEST(JacobianProperty, MatchesFiniteDifferencesOfMeasurementModel) {
  std::mt19937_64 rng(41);
  const double h = 1e-6;
  for (int i = 0; i < 50; ++i) {
    const UnitQuaternion qbar = random_quaternion(rng);
    for (ChartKind k : kAllCharts) {
      const FilterState s = init_state(k, qbar, Vec3::Zero(), Mat6::Identity());
      const Eigen::MatrixXd H = measurement_jacobian(s, kRefs, MeasurementMode::Ekf2);
      const Eigen::MatrixXd Ht = measurement_jacobian(s, kRefs, MeasurementMode::Ekf2Triad);
      const std::array<std::pair<Vec3, Mat3>, 3> cases = {{{kRefs.m_r, H.block<3, 3>(0, 0)},
                                                          {kRefs.a_r, H.block<3, 3>(3, 0)},
                                                          {kRefs.c3r, Ht.block<3, 3>(0, 0)}}};
      for (const auto& [v, block] : cases) {
        for (int c = 0; c < 3; ++c) {
          const Vec3 d = h * Vec3::Unit(c);
          const Vec3 plus = eigen_rotation(centered_chart_inverse(qbar, k, d)).transpose() * v;
          const Vec3 minus = eigen_rotation(centered_chart_inverse(qbar, k, -d)).transpose() * v;
          const Vec3 fd = (plus - minus) / (2 * h);
          EXPECT_LE((fd - block.col(c)).norm(), 1e-5 * block.norm());
        }
      }
      EXPECT_EQ(Mat3(H.block<3, 3>(6, 3)), Mat3::Identity());
      EXPECT_EQ(Mat3(H.block<3, 3>(6, 0)), Mat3::Zero());
    }
  }
}

TEST(Update, ZeroInnovationFixedPoint) {
  std::mt19937_64 rng(42);
  for (MeasurementMode mode : {MeasurementMode::Ekf1, MeasurementMode::Ekf2, MeasurementMode::Ekf2Triad}) {
    const UnitQuaternion q = random_quaternion(rng);
    const Vec3 w(0.1, -0.2, 0.05);
    const FilterState s = init_state(ChartKind::ModifiedRodriguesParams, q, w, random_spd(rng, 0.05));
    const auto [next, diag] = update(s, exact_measurement(0.0, q, w, kRefs), kRefs, NoiseParams{}, {mode});
    EXPECT_LT(diag.residual_norm, 1e-12);
    EXPECT_LT(rotation_error(next.qbar, q), 1e-12);
    EXPECT_LT((next.omega_mean - w).norm(), 1e-12);
    EXPECT_LT(next.P.trace(), s.P.trace());
    EXPECT_EQ(diag.residual.size(), mode == MeasurementMode::Ekf1 ? 6 : 9);
  }
}

TEST(Update, JosephFormEquivalence) {
  std::mt19937_64 rng(43);
  for (int i = 0; i < 100; ++i) {
    const UnitQuaternion q = random_quaternion(rng);
    const FilterState s = init_state(ChartKind::ModifiedRodriguesParams, q, Vec3::Zero(), random_spd(rng, 0.05));
    const Measurement m = exact_measurement(0.0, q * random_deviation(rng, 0.2), Vec3(0.1, 0, 0), kRefs);
    const NoiseParams n;
    const auto [next, diag] = update(s, m, kRefs, n, {MeasurementMode::Ekf2});
    const Eigen::MatrixXd H = measurement_jacobian(s, kRefs, MeasurementMode::Ekf2);
    const Eigen::MatrixXd R = measurement_noise(n, MeasurementMode::Ekf2);
    const Eigen::MatrixXd IKH = Eigen::MatrixXd::Identity(6, 6) - diag.K * H;
    const Eigen::MatrixXd joseph = IKH * s.P * IKH.transpose() + diag.K * R * diag.K.transpose();
    EXPECT_LT((next.P - joseph).cwiseAbs().maxCoeff(), 1e-8);
    // Gain oracle: explicit inverse.
    const Eigen::MatrixXd K = s.P * H.transpose() * (H * s.P * H.transpose() + R).inverse();
    EXPECT_LT((diag.K - K).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Update, Ekf1ConvergesMonotonicallyOnTilt) {
  const UnitQuaternion truth = axis_angle(Vec3::UnitX(), 0.2);
  FilterState s = init_state(ChartKind::ModifiedRodriguesParams, {}, Vec3::Zero(), 0.1 * Mat6::Identity());
  const Measurement m = exact_measurement(0.0, truth, Vec3::Zero(), kRefs);
  double prev = rotation_error(s.qbar, truth);
  for (int i = 0; i < 50; ++i) {
    s = update(s, m, kRefs, NoiseParams{}, {MeasurementMode::Ekf1}).first;
    const double err = rotation_error(s.qbar, truth);
    EXPECT_LT(err, prev);
    prev = err;
  }
  EXPECT_LT(prev, 1e-3);
}

TEST(Update, RotatedMagnetometerSettlesInBetween) {
  // Magnetometer reads m_r rotated 30 deg about the pitch axis; accel exact at
  // identity. EKF2 ends between the two attitudes, TRIAD ignores the mismatch.
  const Vec3 z_m = eigen_rotation(axis_angle(Vec3::UnitY(), 30 * kDeg)).transpose() * kRefs.m_r;
  const Measurement m = Measurement::make(0.0, Vec3::Zero(), kRefs.a_r, z_m);
  for (MeasurementMode mode : {MeasurementMode::Ekf2, MeasurementMode::Ekf2Triad}) {
    FilterState s = init_state(ChartKind::ModifiedRodriguesParams, {}, Vec3::Zero(), 0.1 * Mat6::Identity());
    for (int i = 0; i < 2000; ++i) {
      Measurement mi = m;
      mi.t = i * 0.002;
      s = step(s, mi, kRefs, NoiseParams{}, {mode}).first;
    }
    const double pitch = std::abs(euler_zyx(s.qbar).y()) / kDeg;
    if (mode == MeasurementMode::Ekf2) {
      EXPECT_GT(pitch, 1.0);
      EXPECT_LT(pitch, 29.0);
    } else {
      EXPECT_LT(rotation_error(s.qbar, UnitQuaternion::identity()), 1e-9);
    }
  }
}

TEST(Update, TriadDegenerateGeometryFallsBackToEkf1) {
  const Measurement m = Measurement::make(0.0, Vec3::Zero(), kRefs.a_r, kRefs.a_r);
  const FilterState s = init_state(ChartKind::ModifiedRodriguesParams, {}, Vec3::Zero(), 0.1 * Mat6::Identity());
  const auto [next, diag] = update(s, m, kRefs, NoiseParams{}, {MeasurementMode::Ekf2Triad});
  EXPECT_EQ(diag.applied_mode, MeasurementMode::Ekf1);
  EXPECT_EQ(diag.residual.size(), 6);
  EXPECT_THROW(triad(m.z_a, *m.z_m), DegenerateGeometryError);
}

TEST(Update, MissingMagnetometerIsAnError) {
  const Measurement m = Measurement::make(0.0, Vec3::Zero(), kRefs.a_r, std::nullopt);
  const FilterState s = init_state(ChartKind::ModifiedRodriguesParams, {}, Vec3::Zero(), 0.1 * Mat6::Identity());
  EXPECT_THROW(update(s, m, kRefs, NoiseParams{}, {MeasurementMode::Ekf2}), DomainError);
  EXPECT_NO_THROW(update(s, m, kRefs, NoiseParams{}, {MeasurementMode::Ekf1}));
}

TEST(Update, IllConditionedInnovationRaisesNumericalError) {
  NoiseParams n;
  n.R_a = Vec3(1.0, 1.0, 1e-20).asDiagonal();
  const FilterState s = init_state(ChartKind::ModifiedRodriguesParams, {}, Vec3::Zero(), Mat6::Zero());
  const Measurement m = Measurement::make(0.0, Vec3::Zero(), kRefs.a_r, std::nullopt);
  try {
    update(s, m, kRefs, n, {MeasurementMode::Ekf1});
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_EQ(e.p_trace(), 0.0);
  }
}

TEST(Update, RecentersAndKeepsCovarianceHealthy) {
  std::mt19937_64 rng(44);
  for (ChartKind k : kAllCharts) {
    FilterState s = init_state(k, random_quaternion(rng), Vec3::Zero(), 0.1 * Mat6::Identity());
    for (int i = 0; i < 200; ++i) {
      const Measurement m = exact_measurement(i * 0.002, random_quaternion(rng), random_unit(rng), kRefs);
      s = step(s, m, kRefs, NoiseParams{}, {MeasurementMode::Ekf2}).first;
      ASSERT_EQ(s.e_mean, Vec3::Zero());
      ASSERT_TRUE(is_symmetric_psd(s.P));
    }
  }
}

TEST(Step, FirstMeasurementOnlyUpdates) {
  const FilterState s = init_state(ChartKind::ModifiedRodriguesParams, {}, Vec3::Zero(), 0.1 * Mat6::Identity());
  const Measurement m = exact_measurement(5.0, UnitQuaternion::identity(), Vec3::Zero(), kRefs);
  const auto [a, da] = step(s, m, kRefs, NoiseParams{}, {MeasurementMode::Ekf2});
  const auto [b, db] = update(s, m, kRefs, NoiseParams{}, {MeasurementMode::Ekf2});
  EXPECT_EQ(a.P, b.P);
  ASSERT_TRUE(a.last_t.has_value());
  EXPECT_EQ(*a.last_t, 5.0);
  Measurement same_time = m;
  EXPECT_THROW(step(a, same_time, kRefs, NoiseParams{}, {MeasurementMode::Ekf2}), DomainError);
}

TEST(Step, StationaryStreamStaysAtIdentity) {
  FilterState s = init_state(ChartKind::ModifiedRodriguesParams, {}, Vec3::Zero(), 0.1 * Mat6::Identity());
  for (int i = 0; i < 5000; ++i) {
    s = step(s, exact_measurement(i * 0.002, {}, Vec3::Zero(), kRefs), kRefs, NoiseParams{}, {MeasurementMode::Ekf2})
            .first;
  }
  EXPECT_LT(rotation_error(s.qbar, UnitQuaternion::identity()), 1e-6);
}

TEST(Step, TracksConstantYawRate) {
  const double rate = 0.5;  // rad/s about z
  const double dt = 0.002;
  for (MeasurementMode mode : {MeasurementMode::Ekf1, MeasurementMode::Ekf2, MeasurementMode::Ekf2Triad}) {
    FilterState s = init_state(ChartKind::ModifiedRodriguesParams, {}, Vec3::Zero(), 0.1 * Mat6::Identity());
    UnitQuaternion truth;
    for (int i = 0; i <= 5000; ++i) {
      truth = axis_angle(Vec3::UnitZ(), rate * i * dt);
      s = step(s, exact_measurement(i * dt, truth, Vec3(0, 0, rate), kRefs), kRefs, NoiseParams{}, {mode}).first;
    }
    EXPECT_LT(rotation_error(s.qbar, truth) / kDeg, 0.1) << measurement_mode_name(mode);
  }
}

TEST(Step, ResidualDecaysFromInitialError) {
  const UnitQuaternion truth = axis_angle(Vec3(0.3, 0.4, 0.5).normalized(), 0.7);
  FilterState s = init_state(ChartKind::ModifiedRodriguesParams, truth * axis_angle(Vec3::UnitX(), 10 * kDeg),
                             Vec3::Zero(), 0.1 * Mat6::Identity());
  double first = -1.0;
  double last = 0.0;
  for (int i = 0; i < 5000; ++i) {
    const auto [next, diag] =
        step(s, exact_measurement(i * 0.002, truth, Vec3::Zero(), kRefs), kRefs, NoiseParams{}, {MeasurementMode::Ekf2});
    s = next;
    if (first < 0.0) first = diag.residual_norm;
    last = diag.residual_norm;
  }
  EXPECT_GT(first, 0.1);
  EXPECT_LT(last, 1e-6);
}

TEST(StepProperty, TriadResidualVanishesUnderInPlaneDisturbance) {
  // Stationary at identity, magnetometer offset along body x (inside the
  // a_r-m_r plane), filter started 5 deg off.
  const Vec3 z_m = kRefs.m_r + Vec3(0.5, 0, 0);
  double triad_res = 0.0;
  double ekf2_res = 0.0;
  for (MeasurementMode mode : {MeasurementMode::Ekf2, MeasurementMode::Ekf2Triad}) {
    FilterState s = init_state(ChartKind::ModifiedRodriguesParams, axis_angle(Vec3::UnitY(), 5 * kDeg), Vec3::Zero(),
                               0.1 * Mat6::Identity());
    double res = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const auto [next, diag] =
          step(s, Measurement::make(i * 0.002, Vec3::Zero(), kRefs.a_r, z_m), kRefs, NoiseParams{}, {mode});
      s = next;
      res = diag.residual_norm;
    }
    (mode == MeasurementMode::Ekf2 ? ekf2_res : triad_res) = res;
  }
  EXPECT_LT(triad_res, 1e-6);
  EXPECT_GT(ekf2_res, 0.01);
}

TEST(StepProperty, CovarianceStaysSymmetricPsdUnderRandomMeasurements) {
  std::mt19937_64 rng(45);
  std::normal_distribution<double> noise(0.0, 0.1);
  for (ChartKind k : kAllCharts) {
    FilterState s = init_state(k, random_quaternion(rng), Vec3::Zero(), 0.1 * Mat6::Identity());
    const MeasurementMode mode = static_cast<MeasurementMode>(static_cast<int>(k) % 3);
    for (int i = 0; i < 5000; ++i) {
      const Measurement m = Measurement::make(i * 0.002, 3.0 * random_unit(rng), random_unit(rng), random_unit(rng));
      s = step(s, m, kRefs, NoiseParams{}, {mode}).first;
      ASSERT_TRUE(is_symmetric_psd(s.P)) << i;
      ASSERT_TRUE(s.qbar.coeffs().allFinite());
      ASSERT_NEAR(s.qbar.coeffs().norm(), 1.0, 1e-9);
    }
  }
}
