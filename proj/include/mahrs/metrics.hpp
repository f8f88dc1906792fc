#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mahrs/sim.hpp"

namespace mahrs {

/// Per-sample evaluation of one filter against ground truth. Error fields are
/// NaN when no ground truth is available.
struct MetricsRecord {
  double t = 0.0;
  double rot_err_deg = 0.0;    // estimate vs truth
  double rot_angle_deg = 0.0;  // estimate vs identity
  double residual_norm = 0.0;
  double p_trace = 0.0;
  double yaw_err_deg = 0.0;  // Z-Y-X Euler angles of estimate* x truth
  double pitch_err_deg = 0.0;
  double roll_err_deg = 0.0;
};

/// Fraction of a segment, at its end, treated as steady state.
inline constexpr double kSteadyStateFraction = 0.25;

struct SegmentStats {
  std::size_t index = 0;
  SegmentSpan span;
  std::size_t samples = 0;
  double final_rot_err_deg = NAN;
  double mean_rot_err_deg = NAN;
  double max_rot_err_deg = NAN;
  double final_rot_angle_deg = NAN;
  // Means over the last kSteadyStateFraction of the segment.
  double ss_rot_err_deg = NAN;
  double ss_residual_norm = NAN;
  double ss_abs_yaw_err_deg = NAN;
  double ss_abs_pitch_err_deg = NAN;
  double ss_abs_roll_err_deg = NAN;
};

struct ModeSummary {
  std::string label;
  std::optional<std::string> error;  // set when the filter aborted
  std::size_t samples = 0;
  double mean_rot_err_deg = NAN;
  double max_rot_err_deg = NAN;
  double final_rot_err_deg = NAN;
  std::vector<SegmentStats> segments;
};

/// Span list used when a stream has no trajectory definition: one segment
/// covering [t_first, t_last + dt).
std::vector<SegmentSpan> whole_stream_span(double t_first, double t_last, double dt);

ModeSummary summarize(const std::string& label, const std::vector<MetricsRecord>& records,
                      const std::vector<SegmentSpan>& spans);

/// Human-readable comparison table; deterministic for identical inputs.
std::string format_summary(const std::vector<ModeSummary>& modes,
                           const std::vector<SegmentSpan>& spans);

}  // namespace mahrs
