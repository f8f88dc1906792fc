#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mahrs/mekf.hpp"
#include "mahrs/quaternion.hpp"
#include "mahrs/references.hpp"

namespace mahrs {

enum class SegmentKind { Hold, Slew };

std::string_view segment_kind_name(SegmentKind k);

/// One piece of a piecewise-constant-rate trajectory.
///
/// A hold keeps `target` for `duration` seconds with zero rate. A slew rotates
/// about the body-frame `axis` at `rate` rad/s and must land on `target`
/// exactly: start * axis_angle(axis, rate * duration) == target.
struct TrajectorySegment {
  SegmentKind kind = SegmentKind::Hold;
  UnitQuaternion target;
  double duration = 0.0;
  Vec3 axis = Vec3::UnitZ();
  double rate = 0.0;
  std::string label;
};

struct GroundTruthSample {
  double t = 0.0;
  UnitQuaternion q_true;
  Vec3 omega_true = Vec3::Zero();
  std::size_t segment = 0;
};

/// Time span [start, end) of one segment, in seconds from the first sample.
struct SegmentSpan {
  double start = 0.0;
  double end = 0.0;
  SegmentKind kind = SegmentKind::Hold;
  std::string label;
};

/// Builds a slew from `from` to `to` about a body axis at `rate` rad/s. The
/// duration is the rotation angle about `axis` (taken in (0, 2pi)) over
/// `rate`. Throws DomainError if the relative rotation is not about `axis`.
TrajectorySegment make_slew(const UnitQuaternion& from, const UnitQuaternion& to, const Vec3& axis,
                            double rate, std::string label = {});

/// Attitude at the start of the first segment.
UnitQuaternion trajectory_start(const std::vector<TrajectorySegment>& segments);

/// Checks durations, slew endpoints and hold continuity; throws DomainError.
void validate_segments(const std::vector<TrajectorySegment>& segments);

std::vector<SegmentSpan> segment_spans(const std::vector<TrajectorySegment>& segments);

/// Index of the span containing t (last span for t past the end).
std::size_t segment_at(const std::vector<SegmentSpan>& spans, double t);

/// Number of samples generated at `rate_hz` for a trajectory of `duration` s.
std::size_t sample_count(double duration, double rate_hz);

/// Uniform samples t_k = k / rate_hz over the whole trajectory.
std::vector<GroundTruthSample> generate_trajectory(const std::vector<TrajectorySegment>& segments,
                                                   double rate_hz);

struct VibrationModel {
  double amplitude = 0.0;
  double freq_hz = 0.0;
};

/// Extra disturbance active for t in [t_start, t_end). Noise stds add in
/// quadrature with the base values; hard iron and vibration amplitude add.
struct DisturbanceWindow {
  double t_start = 0.0;
  double t_end = 0.0;
  Vec3 hard_iron = Vec3::Zero();
  double vibration_amplitude = 0.0;
  double accel_noise_std = 0.0;
  double mag_noise_std = 0.0;
};

/// Sensor corruption, applied in the body frame before normalization:
///   z_a = normalize(R^T a_r + accel noise + vibration)
///   z_m = normalize(soft_iron R^T m_r + hard_iron + mag noise)
///   z_omega = omega + gyro noise
struct DisturbanceModel {
  Vec3 hard_iron = Vec3::Zero();
  Mat3 soft_iron = Mat3::Identity();
  double mag_noise_std = 0.0;
  double accel_noise_std = 0.0;
  double gyro_noise_std = 0.0;
  std::optional<VibrationModel> vibration;
  std::vector<DisturbanceWindow> windows;

  /// Throws DomainError for a singular soft-iron matrix, negative stds,
  /// inverted windows, or vibration amplitude without a frequency.
  void validate() const;
};

/// Sensor stream for a ground-truth trajectory; deterministic given `seed`.
std::vector<Measurement> synthesize_measurements(const std::vector<GroundTruthSample>& truth,
                                                 const ReferenceVectors& refs,
                                                 const DisturbanceModel& dist, std::uint64_t seed);

}  // namespace mahrs
