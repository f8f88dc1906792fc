#pragma once

#include <optional>
#include <string_view>
#include <utility>

#include <Eigen/Dense>

#include "mahrs/charts.hpp"
#include "mahrs/quaternion.hpp"
#include "mahrs/references.hpp"
#include "mahrs/triad.hpp"

namespace mahrs {

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

/// Which measurements enter the correction.
///   Ekf1:      (z_a, z_omega), 6 rows
///   Ekf2:      (z_m, z_a, z_omega), 9 rows
///   Ekf2Triad: (c, z_a, z_omega), 9 rows, where c is a TRIAD column built
///              from (z_a, z_m) and compared against the matching reference
enum class MeasurementMode { Ekf1, Ekf2, Ekf2Triad };

std::string_view measurement_mode_name(MeasurementMode m);

struct FilterOptions {
  MeasurementMode mode = MeasurementMode::Ekf2;
  TriadColumn triad_column = TriadColumn::C3;
};

/// Process and sensor noise. Q_omega is a PSD in (rad/s)^2/s; the rest are
/// per-sample covariances of gyro (rad/s)^2 and of normalized directions.
struct NoiseParams {
  Mat3 Q_omega = 10.0 * Mat3::Identity();
  Mat3 R_omega = 0.001 * Mat3::Identity();
  Mat3 R_a = 0.01 * Mat3::Identity();
  Mat3 R_m = 0.01 * Mat3::Identity();

  static NoiseParams isotropic(double q_omega, double r_omega, double r_a, double r_m);

  /// Throws DomainError unless every matrix is symmetric positive definite.
  void validate() const;
};

/// One sensor frame. Direction fields are unit length; z_m is absent for
/// accelerometer/gyro-only streams.
struct Measurement {
  double t = 0.0;
  Vec3 z_omega = Vec3::Zero();
  Vec3 z_a = Vec3::UnitZ();
  std::optional<Vec3> z_m;

  /// Normalizes the raw accelerometer and magnetometer readings. Throws
  /// DomainError for non-finite values or zero-length directions.
  static Measurement make(double t, const Vec3& gyro, const Vec3& accel,
                          const std::optional<Vec3>& mag);
};

/// Filter belief: a distribution in the chart centred on qbar.
///
/// After every completed step the mean has been moved onto qbar, so e_mean is
/// zero. P orders the orientation block before the angular-velocity block.
struct FilterState {
  ChartKind chart = ChartKind::ModifiedRodriguesParams;
  UnitQuaternion qbar;
  Vec3 e_mean = Vec3::Zero();
  Vec3 omega_mean = Vec3::Zero();
  Mat6 P = Mat6::Identity() * 0.1;
  /// Timestamp of the last measurement folded in; unset before the first.
  std::optional<double> last_t;
};

struct StepDiagnostics {
  Eigen::VectorXd residual;
  double residual_norm = 0.0;
  Eigen::MatrixXd S;
  Eigen::MatrixXd K;
  double P_trace = 0.0;
  /// Mode actually applied; Ekf2Triad drops to Ekf1 on degenerate geometry.
  MeasurementMode applied_mode = MeasurementMode::Ekf2;
};

/// Largest accepted gap between consecutive measurements.
inline constexpr double kMaxPredictDt = 1.0;
/// Innovation covariances with reciprocal condition below this are rejected.
inline constexpr double kMinInnovationRcond = 1e-12;

/// Throws DomainError if P0 is not symmetric (1e-9) and PSD (min eig >= -1e-9).
FilterState init_state(ChartKind chart, const UnitQuaternion& q0, const Vec3& omega0,
                       const Mat6& P0);

/// Constant-rate propagation of qbar and of P = F (P + Q) F^T.
FilterState predict(const FilterState& state, const NoiseParams& noise, double dt);

/// Predicted stacked measurement (magnetic slot, z_a, z_omega) for the mode.
Eigen::VectorXd predict_measurement(const FilterState& state, const ReferenceVectors& refs,
                                    MeasurementMode mode, TriadColumn column = TriadColumn::C3);

/// Stacked measurement vector in the same layout. For Ekf2Triad the magnetic
/// slot holds the TRIAD column; throws DegenerateGeometryError if it cannot be
/// formed and DomainError if z_m is required but missing.
Eigen::VectorXd stacked_measurement(const Measurement& meas, MeasurementMode mode,
                                    TriadColumn column = TriadColumn::C3);

/// H linearized at the predicted state: [zbar]x blocks for the directions,
/// identity for the rate.
Eigen::MatrixXd measurement_jacobian(const FilterState& state, const ReferenceVectors& refs,
                                     MeasurementMode mode, TriadColumn column = TriadColumn::C3);

/// blockdiag(R_m, R_a, R_omega), without R_m for Ekf1.
Eigen::MatrixXd measurement_noise(const NoiseParams& noise, MeasurementMode mode);

/// Kalman correction followed by recentering onto the corrected attitude.
/// Throws NumericalError on an ill-conditioned S or a non-finite result.
std::pair<FilterState, StepDiagnostics> update(const FilterState& state, const Measurement& meas,
                                               const ReferenceVectors& refs,
                                               const NoiseParams& noise,
                                               const FilterOptions& options);

/// predict (dt from consecutive timestamps) then update. The first
/// measurement only sets the time base and corrects.
std::pair<FilterState, StepDiagnostics> step(const FilterState& state, const Measurement& meas,
                                             const ReferenceVectors& refs,
                                             const NoiseParams& noise,
                                             const FilterOptions& options);

/// Symmetric within tol and smallest eigenvalue >= -tol.
bool is_symmetric_psd(const Eigen::MatrixXd& m, double tol = 1e-9);

}  // namespace mahrs
