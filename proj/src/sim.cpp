#include "mahrs/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "mahrs/errors.hpp"

namespace mahrs {

namespace {

constexpr double kEndpointTol = 1e-6;  // rad
constexpr double kTimeTol = 1e-9;      // s

void check_std(double v, const char* what) {
  if (!std::isfinite(v) || v < 0.0) {
    throw DomainError(std::string("disturbance: ") + what + " must be a finite, non-negative std");
  }
}

}  // namespace

std::string_view segment_kind_name(SegmentKind k) { return k == SegmentKind::Hold ? "hold" : "slew"; }

TrajectorySegment make_slew(const UnitQuaternion& from, const UnitQuaternion& to, const Vec3& axis,
                            double rate, std::string label) {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw DomainError("slew: rate must be positive");
  const Vec3 u = normalized_or_throw(axis, "slew axis");
  const UnitQuaternion d = conjugate(from) * to;
  const double along = d.vec().dot(u);
  if ((d.vec() - along * u).norm() > 1e-9) {
    throw DomainError("slew: relative rotation is not about the given axis");
  }
  double angle = 2.0 * std::atan2(along, d.w());
  if (angle < 0.0) angle += 2.0 * std::numbers::pi;
  if (angle < kEndpointTol || angle > 2.0 * std::numbers::pi - kEndpointTol) {
    throw DomainError("slew: start and target are the same attitude");
  }
  TrajectorySegment s;
  s.kind = SegmentKind::Slew;
  s.target = to;
  s.axis = u;
  s.rate = rate;
  s.duration = angle / rate;
  s.label = std::move(label);
  return s;
}

UnitQuaternion trajectory_start(const std::vector<TrajectorySegment>& segments) {
  if (segments.empty()) throw DomainError("trajectory: no segments");
  const TrajectorySegment& first = segments.front();
  if (first.kind == SegmentKind::Hold) return first.target;
  return first.target * axis_angle(first.axis, -first.rate * first.duration);
}

void validate_segments(const std::vector<TrajectorySegment>& segments) {
  UnitQuaternion current = trajectory_start(segments);
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const TrajectorySegment& s = segments[i];
    const std::string where = "trajectory segment " + std::to_string(i) + ": ";
    if (!(s.duration > 0.0) || !std::isfinite(s.duration)) {
      throw DomainError(where + "duration must be positive");
    }
    if (s.kind == SegmentKind::Hold) {
      if (!same_rotation(current, s.target, kEndpointTol)) {
        throw DomainError(where + "hold target differs from the attitude reached so far");
      }
      continue;
    }
    if (!(s.rate > 0.0) || !std::isfinite(s.rate)) throw DomainError(where + "slew rate must be positive");
    if (std::abs(s.axis.norm() - 1.0) > 1e-9) throw DomainError(where + "slew axis must be unit");
    current = current * axis_angle(s.axis, s.rate * s.duration);
    if (!same_rotation(current, s.target, kEndpointTol)) {
      throw DomainError(where + "rate * duration does not reach the slew target");
    }
  }
}

std::vector<SegmentSpan> segment_spans(const std::vector<TrajectorySegment>& segments) {
  std::vector<SegmentSpan> spans;
  spans.reserve(segments.size());
  double t = 0.0;
  for (const auto& s : segments) {
    spans.push_back({t, t + s.duration, s.kind, s.label});
    t += s.duration;
  }
  return spans;
}

std::size_t segment_at(const std::vector<SegmentSpan>& spans, double t) {
  for (std::size_t i = 0; i < spans.size(); ++i) {
    if (t + kTimeTol < spans[i].end) return i;
  }
  return spans.empty() ? 0 : spans.size() - 1;
}

std::size_t sample_count(double duration, double rate_hz) {
  return static_cast<std::size_t>(std::floor(duration * rate_hz + 1e-6));
}

std::vector<GroundTruthSample> generate_trajectory(const std::vector<TrajectorySegment>& segments,
                                                   double rate_hz) {
  if (!(rate_hz > 0.0) || !std::isfinite(rate_hz)) throw DomainError("trajectory: rate_hz must be positive");
  validate_segments(segments);
  const std::vector<SegmentSpan> spans = segment_spans(segments);

  // Attitude at the start of each segment, propagated so the quaternion
  // path is continuous (no sign jumps at boundaries).
  std::vector<UnitQuaternion> starts;
  starts.reserve(segments.size());
  UnitQuaternion current = trajectory_start(segments);
  for (const auto& s : segments) {
    starts.push_back(current);
    if (s.kind == SegmentKind::Slew) current = current * axis_angle(s.axis, s.rate * s.duration);
  }

  const std::size_t n = sample_count(spans.back().end, rate_hz);
  std::vector<GroundTruthSample> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / rate_hz;
    const std::size_t j = segment_at(spans, t);
    const TrajectorySegment& s = segments[j];
    GroundTruthSample g;
    g.t = t;
    g.segment = j;
    if (s.kind == SegmentKind::Slew) {
      const double tau = std::clamp(t - spans[j].start, 0.0, s.duration);
      g.q_true = starts[j] * axis_angle(s.axis, s.rate * tau);
      g.omega_true = s.axis * s.rate;
    } else {
      g.q_true = starts[j];
    }
    out.push_back(g);
  }
  return out;
}

void DisturbanceModel::validate() const {
  if (!all_finite(hard_iron)) throw DomainError("disturbance: hard_iron must be finite");
  if (!soft_iron.allFinite() || std::abs(soft_iron.determinant()) < 1e-9) {
    throw DomainError("disturbance: soft_iron must be finite and invertible");
  }
  check_std(mag_noise_std, "mag_noise_std");
  check_std(accel_noise_std, "accel_noise_std");
  check_std(gyro_noise_std, "gyro_noise_std");
  bool needs_freq = false;
  if (vibration) {
    check_std(vibration->amplitude, "vibration amplitude");
    needs_freq = vibration->amplitude > 0.0;
  }
  for (const auto& w : windows) {
    // t_end may be +inf (active until the end of the stream).
    if (!std::isfinite(w.t_start) || std::isnan(w.t_end) || !(w.t_end > w.t_start)) {
      throw DomainError("disturbance: window must satisfy t_start < t_end");
    }
    if (!all_finite(w.hard_iron)) throw DomainError("disturbance: window hard_iron must be finite");
    check_std(w.vibration_amplitude, "window vibration_amplitude");
    check_std(w.accel_noise_std, "window accel_noise_std");
    check_std(w.mag_noise_std, "window mag_noise_std");
    needs_freq = needs_freq || w.vibration_amplitude > 0.0;
  }
  if (needs_freq && (!vibration || !(vibration->freq_hz > 0.0))) {
    throw DomainError("disturbance: vibration amplitude given without a positive vibration.freq_hz");
  }
}

std::vector<Measurement> synthesize_measurements(const std::vector<GroundTruthSample>& truth,
                                                 const ReferenceVectors& refs,
                                                 const DisturbanceModel& dist, std::uint64_t seed) {
  if (truth.empty()) throw DomainError("synthesize_measurements: empty trajectory");
  dist.validate();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto draw = [&] {
    const double x = normal(rng);
    const double y = normal(rng);
    const double z = normal(rng);
    return Vec3(x, y, z);
  };

  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<Measurement> out;
  out.reserve(truth.size());
  for (const auto& g : truth) {
    Vec3 hard = dist.hard_iron;
    double vib = dist.vibration ? dist.vibration->amplitude : 0.0;
    double accel_var = dist.accel_noise_std * dist.accel_noise_std;
    double mag_var = dist.mag_noise_std * dist.mag_noise_std;
    for (const auto& w : dist.windows) {
      if (g.t + kTimeTol < w.t_start || g.t + kTimeTol >= w.t_end) continue;
      hard += w.hard_iron;
      vib += w.vibration_amplitude;
      accel_var += w.accel_noise_std * w.accel_noise_std;
      mag_var += w.mag_noise_std * w.mag_noise_std;
    }

    // Fixed draw order keeps streams comparable across noise settings.
    const Vec3 n_gyro = draw();
    const Vec3 n_accel = draw();
    const Vec3 n_mag = draw();

    const RotationMatrix Rt = to_rotation_matrix(g.q_true).transpose();
    Vec3 accel = Rt * refs.a_r + std::sqrt(accel_var) * n_accel;
    if (vib > 0.0) {
      const double phase = two_pi * dist.vibration->freq_hz * g.t;
      accel += vib * Vec3(std::sin(phase), std::sin(phase + two_pi / 3.0),
                          std::sin(phase + 2.0 * two_pi / 3.0));
    }
    const Vec3 mag = dist.soft_iron * (Rt * refs.m_r) + hard + std::sqrt(mag_var) * n_mag;
    const Vec3 gyro = g.omega_true + dist.gyro_noise_std * n_gyro;
    out.push_back(Measurement::make(g.t, gyro, accel, mag));
  }
  return out;
}

}  // namespace mahrs
