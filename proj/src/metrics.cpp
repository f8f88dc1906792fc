#include "mahrs/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace mahrs {

namespace {

struct Accumulator {
  double sum = 0.0;
  std::size_t n = 0;
  void add(double v) {
    sum += v;
    ++n;
  }
  double mean() const { return n == 0 ? NAN : sum / static_cast<double>(n); }
};

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.insert(0, width - s.size(), ' ');
  return s;
}

std::string pad_right(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

}  // namespace

std::vector<SegmentSpan> whole_stream_span(double t_first, double t_last, double dt) {
  return {SegmentSpan{t_first, t_last + dt, SegmentKind::Hold, "stream"}};
}

ModeSummary summarize(const std::string& label, const std::vector<MetricsRecord>& records,
                      const std::vector<SegmentSpan>& spans) {
  ModeSummary out;
  out.label = label;
  out.samples = records.size();

  std::vector<std::vector<std::size_t>> members(spans.size());
  Accumulator all;
  double max_err = NAN;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const MetricsRecord& r = records[i];
    all.add(r.rot_err_deg);
    max_err = std::isnan(max_err) ? r.rot_err_deg : std::max(max_err, r.rot_err_deg);
    if (!spans.empty()) members[segment_at(spans, r.t)].push_back(i);
  }
  out.mean_rot_err_deg = all.mean();
  out.max_rot_err_deg = max_err;
  if (!records.empty()) out.final_rot_err_deg = records.back().rot_err_deg;

  for (std::size_t s = 0; s < spans.size(); ++s) {
    SegmentStats st;
    st.index = s;
    st.span = spans[s];
    st.samples = members[s].size();
    if (!members[s].empty()) {
      const double ss_start = spans[s].end - kSteadyStateFraction * (spans[s].end - spans[s].start);
      Accumulator err, ss_err, ss_res, ss_yaw, ss_pitch, ss_roll;
      double mx = NAN;
      for (std::size_t i : members[s]) {
        const MetricsRecord& r = records[i];
        err.add(r.rot_err_deg);
        mx = std::isnan(mx) ? r.rot_err_deg : std::max(mx, r.rot_err_deg);
        if (r.t + 1e-9 >= ss_start) {
          ss_err.add(r.rot_err_deg);
          ss_res.add(r.residual_norm);
          ss_yaw.add(std::abs(r.yaw_err_deg));
          ss_pitch.add(std::abs(r.pitch_err_deg));
          ss_roll.add(std::abs(r.roll_err_deg));
        }
      }
      const MetricsRecord& last = records[members[s].back()];
      st.final_rot_err_deg = last.rot_err_deg;
      st.final_rot_angle_deg = last.rot_angle_deg;
      st.mean_rot_err_deg = err.mean();
      st.max_rot_err_deg = mx;
      st.ss_rot_err_deg = ss_err.mean();
      st.ss_residual_norm = ss_res.mean();
      st.ss_abs_yaw_err_deg = ss_yaw.mean();
      st.ss_abs_pitch_err_deg = ss_pitch.mean();
      st.ss_abs_roll_err_deg = ss_roll.mean();
    }
    out.segments.push_back(st);
  }
  return out;
}

std::string format_summary(const std::vector<ModeSummary>& modes,
                           const std::vector<SegmentSpan>& spans) {
  std::string s;
  s += "Segments: " + std::to_string(spans.size()) + "\n\n";

  for (const ModeSummary& m : modes) {
    s += "== " + m.label + " (" + std::to_string(m.samples) + " samples)";
    if (m.error) s += "  FAILED: " + *m.error;
    s += "\n";
    s += "   mean rot err " + fmt("%.4f", m.mean_rot_err_deg) + " deg, max " +
         fmt("%.4f", m.max_rot_err_deg) + " deg, final " + fmt("%.4f", m.final_rot_err_deg) +
         " deg\n";
    s += "   seg kind label              start_s    end_s  final_deg   mean_deg    max_deg"
         "  ss_err_deg  ss_resid    ss_yaw  ss_pitch   ss_roll\n";
    for (const SegmentStats& st : m.segments) {
      s += pad(std::to_string(st.index), 6) + " " + pad_right(std::string(segment_kind_name(st.span.kind)), 4) +
           " " + pad_right(st.span.label.substr(0, 18), 18) + pad(fmt("%.3f", st.span.start), 8) +
           pad(fmt("%.3f", st.span.end), 9) + pad(fmt("%.4f", st.final_rot_err_deg), 11) +
           pad(fmt("%.4f", st.mean_rot_err_deg), 11) + pad(fmt("%.4f", st.max_rot_err_deg), 11) +
           pad(fmt("%.4f", st.ss_rot_err_deg), 12) + pad(fmt("%.3e", st.ss_residual_norm), 10) +
           pad(fmt("%.4f", st.ss_abs_yaw_err_deg), 10) + pad(fmt("%.4f", st.ss_abs_pitch_err_deg), 10) +
           pad(fmt("%.4f", st.ss_abs_roll_err_deg), 10) + "\n";
    }
    s += "\n";
  }

  if (modes.size() > 1) {
    s += "Steady-state rotation error (deg) by segment\n";
    s += "   seg label             ";
    for (const ModeSummary& m : modes) s += pad(m.label.substr(0, 16), 17);
    s += "\n";
    for (std::size_t i = 0; i < spans.size(); ++i) {
      s += pad(std::to_string(i), 6) + " " + pad_right(spans[i].label.substr(0, 18), 18);
      for (const ModeSummary& m : modes) {
        const double v = i < m.segments.size() ? m.segments[i].ss_rot_err_deg : NAN;
        s += pad(fmt("%.4f", v), 17);
      }
      s += "\n";
    }
  }
  return s;
}

}  // namespace mahrs
