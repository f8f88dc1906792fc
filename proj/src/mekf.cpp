#include "mahrs/mekf.hpp"

#include <cmath>
#include <string>

#include "mahrs/errors.hpp"

namespace mahrs {

namespace {

// Below this rotation increment the prediction deviation is the identity.
constexpr double kMinRotationIncrement = 1e-10;

bool spd(const Mat3& m) {
  if (!m.allFinite() || (m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12) return false;
  Eigen::LLT<Mat3> llt(m);
  return llt.info() == Eigen::Success;
}

Vec3 magnetic_reference(const ReferenceVectors& refs, MeasurementMode mode, TriadColumn column) {
  if (mode == MeasurementMode::Ekf2Triad) {
    return column == TriadColumn::C2 ? refs.c2r : refs.c3r;
  }
  return refs.m_r;
}

int rows_for(MeasurementMode mode) { return mode == MeasurementMode::Ekf1 ? 6 : 9; }

template <int N>
std::pair<FilterState, StepDiagnostics> correct(const FilterState& state,
                                                const Eigen::Matrix<double, N, 1>& z,
                                                const Eigen::Matrix<double, N, 1>& zbar,
                                                const Eigen::Matrix<double, N, 6>& H,
                                                const Eigen::Matrix<double, N, N>& R,
                                                MeasurementMode applied) {
  using VecN = Eigen::Matrix<double, N, 1>;
  using MatN = Eigen::Matrix<double, N, N>;
  using Gain = Eigen::Matrix<double, 6, N>;

  const VecN y = z - zbar;
  const Eigen::Matrix<double, 6, N> PHt = state.P * H.transpose();
  MatN S = H * PHt + R;
  S = 0.5 * (S + S.transpose()).eval();

  const Eigen::LDLT<MatN> ldlt(S);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || ldlt.rcond() < kMinInnovationRcond) {
    throw NumericalError("update: innovation covariance is singular or ill-conditioned",
                         y.norm(), state.P.trace());
  }
  // K = P H^T S^-1, solved as S K^T = H P.
  const Gain K = ldlt.solve(PHt.transpose()).transpose();

  Vec6 x;
  x << state.e_mean, state.omega_mean;
  x += K * y;

  Mat6 P = (Mat6::Identity() - K * H) * state.P;
  P = 0.5 * (P + P.transpose()).eval();

  if (!x.allFinite() || !P.allFinite()) {
    throw NumericalError("update: non-finite state after correction", y.norm(), state.P.trace());
  }

  FilterState next = state;
  const Vec3 e = saturate(state.chart, x.head<3>());
  next.qbar = centered_chart_inverse(state.qbar, state.chart, e);
  next.e_mean = Vec3::Zero();
  next.omega_mean = x.tail<3>();
  next.P = P;

  StepDiagnostics diag;
  diag.residual = y;
  diag.residual_norm = y.norm();
  diag.S = S;
  diag.K = K;
  diag.P_trace = P.trace();
  diag.applied_mode = applied;
  return {next, diag};
}

}  // namespace

std::string_view measurement_mode_name(MeasurementMode m) {
  switch (m) {
    case MeasurementMode::Ekf1:
      return "ekf1";
    case MeasurementMode::Ekf2:
      return "ekf2";
    case MeasurementMode::Ekf2Triad:
      return "ekf2-triad";
  }
  return "?";
}

NoiseParams NoiseParams::isotropic(double q_omega, double r_omega, double r_a, double r_m) {
  NoiseParams n;
  n.Q_omega = q_omega * Mat3::Identity();
  n.R_omega = r_omega * Mat3::Identity();
  n.R_a = r_a * Mat3::Identity();
  n.R_m = r_m * Mat3::Identity();
  return n;
}

void NoiseParams::validate() const {
  if (!spd(Q_omega)) throw DomainError("noise: Q_omega is not symmetric positive definite");
  if (!spd(R_omega)) throw DomainError("noise: R_omega is not symmetric positive definite");
  if (!spd(R_a)) throw DomainError("noise: R_a is not symmetric positive definite");
  if (!spd(R_m)) throw DomainError("noise: R_m is not symmetric positive definite");
}

Measurement Measurement::make(double t, const Vec3& gyro, const Vec3& accel,
                              const std::optional<Vec3>& mag) {
  if (!std::isfinite(t)) throw DomainError("measurement: non-finite timestamp");
  if (!all_finite(gyro)) throw DomainError("measurement: non-finite gyro reading");
  Measurement m;
  m.t = t;
  m.z_omega = gyro;
  m.z_a = normalized_or_throw(accel, "measurement accel");
  if (mag) m.z_m = normalized_or_throw(*mag, "measurement mag");
  return m;
}

bool is_symmetric_psd(const Eigen::MatrixXd& m, double tol) {
  if (m.rows() != m.cols() || !m.allFinite()) return false;
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol) return false;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol;
}

FilterState init_state(ChartKind chart, const UnitQuaternion& q0, const Vec3& omega0,
                       const Mat6& P0) {
  if (!all_finite(omega0)) throw DomainError("init_state: non-finite initial rate");
  if (!is_symmetric_psd(P0)) {
    throw DomainError("init_state: P0 must be symmetric positive semidefinite");
  }
  FilterState s;
  s.chart = chart;
  s.qbar = q0;
  s.e_mean = Vec3::Zero();
  s.omega_mean = omega0;
  s.P = P0;
  return s;
}

FilterState predict(const FilterState& state, const NoiseParams& noise, double dt) {
  if (!(dt > 0.0)) throw DomainError("predict: dt must be positive (got " + std::to_string(dt) + ")");
  if (dt > kMaxPredictDt) {
    throw DomainError("predict: dt " + std::to_string(dt) + " s exceeds the stale-stream limit");
  }

  const double rate = state.omega_mean.norm();
  UnitQuaternion delta;
  if (rate * dt >= kMinRotationIncrement) {
    delta = axis_angle(state.omega_mean / rate, rate * dt);
  }

  Mat6 F = Mat6::Identity();
  F.topLeftCorner<3, 3>() = to_rotation_matrix(delta).transpose();
  F.topRightCorner<3, 3>() = Mat3::Identity() * dt;

  const double dt2 = dt * dt;
  Mat6 Q;
  Q.topLeftCorner<3, 3>() = noise.Q_omega * (dt2 * dt / 3.0);
  Q.topRightCorner<3, 3>() = -noise.Q_omega * (dt2 / 2.0);
  Q.bottomLeftCorner<3, 3>() = -noise.Q_omega * (dt2 / 2.0);
  Q.bottomRightCorner<3, 3>() = noise.Q_omega * dt;

  FilterState next = state;
  next.qbar = state.qbar * delta;
  Mat6 P = F * (state.P + Q) * F.transpose();
  next.P = 0.5 * (P + P.transpose());
  return next;
}

Eigen::VectorXd predict_measurement(const FilterState& state, const ReferenceVectors& refs,
                                    MeasurementMode mode, TriadColumn column) {
  const RotationMatrix Rt = to_rotation_matrix(state.qbar).transpose();
  Eigen::VectorXd z(rows_for(mode));
  int row = 0;
  if (mode != MeasurementMode::Ekf1) {
    z.segment<3>(row) = Rt * magnetic_reference(refs, mode, column);
    row += 3;
  }
  z.segment<3>(row) = Rt * refs.a_r;
  z.segment<3>(row + 3) = state.omega_mean;
  return z;
}

Eigen::VectorXd stacked_measurement(const Measurement& meas, MeasurementMode mode,
                                    TriadColumn column) {
  Eigen::VectorXd z(rows_for(mode));
  int row = 0;
  if (mode != MeasurementMode::Ekf1) {
    if (!meas.z_m) {
      throw DomainError("measurement at t=" + std::to_string(meas.t) +
                        " has no magnetometer reading");
    }
    z.segment<3>(row) =
        mode == MeasurementMode::Ekf2Triad ? triad_column(meas.z_a, *meas.z_m, column) : *meas.z_m;
    row += 3;
  }
  z.segment<3>(row) = meas.z_a;
  z.segment<3>(row + 3) = meas.z_omega;
  return z;
}

Eigen::MatrixXd measurement_jacobian(const FilterState& state, const ReferenceVectors& refs,
                                     MeasurementMode mode, TriadColumn column) {
  const Eigen::VectorXd zbar = predict_measurement(state, refs, mode, column);
  const int n = rows_for(mode);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, 6);
  for (int row = 0; row + 3 < n; row += 3) {
    H.block<3, 3>(row, 0) = skew(zbar.segment<3>(row));
  }
  H.block<3, 3>(n - 3, 3) = Mat3::Identity();
  return H;
}

Eigen::MatrixXd measurement_noise(const NoiseParams& noise, MeasurementMode mode) {
  const int n = rows_for(mode);
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(n, n);
  int row = 0;
  if (mode != MeasurementMode::Ekf1) {
    R.block<3, 3>(0, 0) = noise.R_m;
    row = 3;
  }
  R.block<3, 3>(row, row) = noise.R_a;
  R.block<3, 3>(row + 3, row + 3) = noise.R_omega;
  return R;
}

std::pair<FilterState, StepDiagnostics> update(const FilterState& state, const Measurement& meas,
                                               const ReferenceVectors& refs,
                                               const NoiseParams& noise,
                                               const FilterOptions& options) {
  MeasurementMode mode = options.mode;
  Eigen::VectorXd z;
  try {
    z = stacked_measurement(meas, mode, options.triad_column);
  } catch (const DegenerateGeometryError&) {
    if (mode != MeasurementMode::Ekf2Triad) throw;
    // Field aligned with gravity: no usable TRIAD column this sample.
    mode = MeasurementMode::Ekf1;
    z = stacked_measurement(meas, mode);
  }

  const Eigen::VectorXd zbar = predict_measurement(state, refs, mode, options.triad_column);
  const Eigen::MatrixXd H = measurement_jacobian(state, refs, mode, options.triad_column);
  const Eigen::MatrixXd R = measurement_noise(noise, mode);

  if (mode == MeasurementMode::Ekf1) {
    return correct<6>(state, z, zbar, H, R, mode);
  }
  return correct<9>(state, z, zbar, H, R, mode);
}

std::pair<FilterState, StepDiagnostics> step(const FilterState& state, const Measurement& meas,
                                             const ReferenceVectors& refs,
                                             const NoiseParams& noise,
                                             const FilterOptions& options) {
  FilterState prior = state;
  if (state.last_t) {
    prior = predict(state, noise, meas.t - *state.last_t);
  }
  auto result = update(prior, meas, refs, noise, options);
  result.first.last_t = meas.t;
  return result;
}

}  // namespace mahrs
