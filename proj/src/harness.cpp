#include "mahrs/harness.hpp"

#include <cmath>
#include <future>
#include <numbers>

#include "mahrs/errors.hpp"
#include "mahrs/log_io.hpp"

namespace mahrs {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

MetricsRecord record_for(const FilterState& state, const StepDiagnostics& diag, double t,
                         const UnitQuaternion* truth) {
  MetricsRecord r;
  r.t = t;
  r.rot_angle_deg = rotation_error(UnitQuaternion::identity(), state.qbar) * kRadToDeg;
  r.residual_norm = diag.residual_norm;
  r.p_trace = diag.P_trace;
  if (truth != nullptr) {
    r.rot_err_deg = rotation_error(state.qbar, *truth) * kRadToDeg;
    const Vec3 ypr = euler_zyx(conjugate(state.qbar) * *truth) * kRadToDeg;
    r.yaw_err_deg = ypr.x();
    r.pitch_err_deg = ypr.y();
    r.roll_err_deg = ypr.z();
  } else {
    r.rot_err_deg = r.yaw_err_deg = r.pitch_err_deg = r.roll_err_deg = NAN;
  }
  return r;
}

}  // namespace

ScenarioStream build_stream(const ScenarioConfig& cfg) {
  ScenarioStream s;
  if (!cfg.segments.empty()) {
    const std::vector<GroundTruthSample> truth = generate_trajectory(cfg.segments, cfg.rate_hz);
    s.measurements = synthesize_measurements(truth, cfg.refs, cfg.disturbance, cfg.seed);
    s.truth.reserve(truth.size());
    for (const auto& g : truth) s.truth.push_back(g.q_true);
    s.spans = segment_spans(cfg.segments);
    return s;
  }
  if (!cfg.input_log) throw ConfigError("", "config has neither trajectory nor input_log");
  s.measurements = ingest_log(*cfg.input_log);
  if (s.measurements.empty()) throw ParseError(cfg.input_log->string(), 0, "log has no samples");
  if (cfg.truth_log) {
    const std::vector<TruthRow> rows = read_truth_log(*cfg.truth_log);
    if (rows.size() != s.measurements.size()) {
      throw ParseError(cfg.truth_log->string(), 0,
                       "row count " + std::to_string(rows.size()) + " does not match sensor log (" +
                           std::to_string(s.measurements.size()) + ")");
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (std::abs(rows[i].t - s.measurements[i].t) > 1e-9) {
        throw ParseError(cfg.truth_log->string(), 0,
                         "timestamp mismatch with sensor log at row " + std::to_string(i + 1));
      }
      s.truth.push_back(rows[i].q);
    }
  }
  const double t0 = s.measurements.front().t;
  const double t1 = s.measurements.back().t;
  const double dt = s.measurements.size() > 1
                        ? (t1 - t0) / static_cast<double>(s.measurements.size() - 1)
                        : 1.0 / cfg.rate_hz;
  s.spans = whole_stream_span(t0, t1, dt);
  return s;
}

UnitQuaternion initial_attitude(const ScenarioConfig& cfg, const ScenarioStream& stream) {
  const UnitQuaternion base = stream.truth.empty() ? UnitQuaternion::identity() : stream.truth.front();
  if (cfg.init_error_deg == 0.0) return base;
  return base * axis_angle(cfg.init_error_axis, cfg.init_error_deg / kRadToDeg);
}

ModeRun run_filter(const ScenarioConfig& cfg, const ScenarioStream& stream, const ModeSpec& spec) {
  ModeRun run;
  run.spec = spec;
  run.records.reserve(stream.measurements.size());
  const FilterOptions opts{measurement_mode_of(spec.id), cfg.triad_column};
  try {
    FilterState state = init_state(cfg.chart, initial_attitude(cfg, stream), Vec3::Zero(), cfg.P0);
    for (std::size_t k = 0; k < stream.measurements.size(); ++k) {
      auto [next, diag] = step(state, stream.measurements[k], cfg.refs, spec.noise, opts);
      state = std::move(next);
      run.records.push_back(record_for(state, diag, stream.measurements[k].t,
                                       stream.truth.empty() ? nullptr : &stream.truth[k]));
    }
    run.final_state = state;
  } catch (const Error& e) {
    const std::size_t k = run.records.size();
    run.error = "sample " + std::to_string(k) +
                (k < stream.measurements.size() ? " (t=" + format_double(stream.measurements[k].t) + " s)" : "") +
                ": " + e.what();
  }
  return run;
}

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
  if (cfg.modes.empty()) throw ConfigError("modes", "at least one mode is required");
  ScenarioResult out;
  out.stream = build_stream(cfg);

  std::vector<std::future<ModeRun>> jobs;
  jobs.reserve(cfg.modes.size());
  for (const ModeSpec& spec : cfg.modes) {
    jobs.push_back(std::async(std::launch::async, [&cfg, &out, spec] { return run_filter(cfg, out.stream, spec); }));
  }
  for (auto& j : jobs) out.runs.push_back(j.get());

  for (const ModeRun& r : out.runs) {
    ModeSummary s = summarize(r.spec.name(), r.records, out.stream.spans);
    s.error = r.error;
    out.summaries.push_back(std::move(s));
  }
  out.summary_text = format_summary(out.summaries, out.stream.spans);
  return out;
}

ReferenceVectors calibrate_references(const std::vector<Measurement>& static_stream) {
  if (static_stream.size() < kMinCalibrationSamples) {
    throw DomainError("calibration: need at least " + std::to_string(kMinCalibrationSamples) +
                      " samples, got " + std::to_string(static_stream.size()));
  }
  Vec3 sa = Vec3::Zero();
  Vec3 sm = Vec3::Zero();
  for (std::size_t i = 0; i < static_stream.size(); ++i) {
    const Measurement& m = static_stream[i];
    if (!m.z_m) throw DomainError("calibration: sample " + std::to_string(i) + " has no magnetometer reading");
    sa += m.z_a;
    sm += *m.z_m;
  }
  const double n = static_cast<double>(static_stream.size());
  const Vec3 mean_a = sa / n;
  const Vec3 mean_m = sm / n;
  if (mean_a.norm() < 0.5 || mean_m.norm() < 0.5) {
    throw DomainError("calibration: inconsistent stream (mean accel norm " + format_double(mean_a.norm()) +
                      ", mean mag norm " + format_double(mean_m.norm()) + "); the sensor was not static");
  }
  return make_references(mean_a, mean_m);
}

}  // namespace mahrs
