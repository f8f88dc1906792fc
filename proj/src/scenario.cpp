#include "mahrs/scenario.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <set>

#include "mahrs/errors.hpp"

#ifndef MAHRS_DEFAULT_PRESET_DIR
#define MAHRS_DEFAULT_PRESET_DIR "presets"
#endif

namespace mahrs {

using nlohmann::json;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string index(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

void check_keys(const json& j, const std::string& path, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.contains(key)) {
      std::string valid;
      for (const auto& a : allowed) valid += (valid.empty() ? "" : ", ") + a;
      throw ConfigError(join(path, key), "unknown key (valid: " + valid + ")");
    }
  }
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "expected a finite number");
  return v;
}

double positive(const json& j, const std::string& path) {
  const double v = number(j, path);
  if (!(v > 0.0)) throw ConfigError(path, "must be positive");
  return v;
}

double non_negative(const json& j, const std::string& path) {
  const double v = number(j, path);
  if (v < 0.0) throw ConfigError(path, "must be non-negative");
  return v;
}

std::string string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}

Vec3 vec3(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) throw ConfigError(path, "expected an array of 3 numbers");
  return {number(j[0], index(path, 0)), number(j[1], index(path, 1)), number(j[2], index(path, 2))};
}

Vec3 unit_vec3(const json& j, const std::string& path) {
  const Vec3 v = vec3(j, path);
  if (v.norm() < 1e-12) throw ConfigError(path, "vector must be non-zero");
  return v.normalized();
}

// Scalar s -> s I; [a, b, c] -> diag; 3x3 nested array -> as given.
template <int N>
Eigen::Matrix<double, N, N> square(const json& j, const std::string& path) {
  using M = Eigen::Matrix<double, N, N>;
  if (j.is_number()) return number(j, path) * M::Identity();
  if (!j.is_array() || j.size() != static_cast<std::size_t>(N)) {
    throw ConfigError(path, "expected a number, " + std::to_string(N) + " diagonal entries or a " +
                                std::to_string(N) + "x" + std::to_string(N) + " array");
  }
  M m = M::Zero();
  if (j[0].is_number()) {
    for (int i = 0; i < N; ++i) m(i, i) = number(j[i], index(path, i));
    return m;
  }
  for (int r = 0; r < N; ++r) {
    const json& row = j[r];
    const std::string rp = index(path, r);
    if (!row.is_array() || row.size() != static_cast<std::size_t>(N)) {
      throw ConfigError(rp, "expected a row of " + std::to_string(N) + " numbers");
    }
    for (int c = 0; c < N; ++c) m(r, c) = number(row[c], index(rp, c));
  }
  return m;
}

UnitQuaternion orientation(const json& j, const std::string& path) {
  if (j.is_string()) {
    if (j.get<std::string>() == "identity") return UnitQuaternion::identity();
    throw ConfigError(path, "expected \"identity\", {axis, angle_deg} or {quaternion}");
  }
  check_keys(j, path, {"axis", "angle_deg", "quaternion"});
  if (j.contains("quaternion")) {
    if (j.contains("axis") || j.contains("angle_deg")) {
      throw ConfigError(path, "give either quaternion or axis/angle_deg, not both");
    }
    const json& q = j["quaternion"];
    const std::string qp = join(path, "quaternion");
    if (!q.is_array() || q.size() != 4) throw ConfigError(qp, "expected [w, x, y, z]");
    try {
      return {number(q[0], index(qp, 0)), number(q[1], index(qp, 1)), number(q[2], index(qp, 2)),
              number(q[3], index(qp, 3))};
    } catch (const DomainError& e) {
      throw ConfigError(qp, e.what());
    }
  }
  if (!j.contains("axis") || !j.contains("angle_deg")) {
    throw ConfigError(path, "orientation needs axis and angle_deg");
  }
  return axis_angle(unit_vec3(j["axis"], join(path, "axis")),
                    number(j["angle_deg"], join(path, "angle_deg")) * kDeg);
}

std::vector<TrajectorySegment> parse_trajectory(const json& j, const std::string& path) {
  check_keys(j, path, {"start", "segments"});
  UnitQuaternion current =
      j.contains("start") ? orientation(j["start"], join(path, "start")) : UnitQuaternion::identity();
  if (!j.contains("segments") || !j["segments"].is_array() || j["segments"].empty()) {
    throw ConfigError(join(path, "segments"), "expected a non-empty array");
  }

  std::vector<TrajectorySegment> out;
  const json& segs = j["segments"];
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const json& s = segs[i];
    const std::string sp = index(join(path, "segments"), i);
    if (!s.is_object() || !s.contains("kind")) throw ConfigError(sp, "segment needs a kind");
    const std::string kind = string(s["kind"], join(sp, "kind"));
    const std::string label =
        s.contains("label") ? string(s["label"], join(sp, "label")) : kind + "-" + std::to_string(i);

    if (kind == "hold") {
      check_keys(s, sp, {"kind", "label", "duration_s", "target"});
      if (!s.contains("duration_s")) throw ConfigError(join(sp, "duration_s"), "required");
      TrajectorySegment seg;
      seg.kind = SegmentKind::Hold;
      seg.duration = positive(s["duration_s"], join(sp, "duration_s"));
      seg.target = current;
      seg.label = label;
      if (s.contains("target")) {
        const UnitQuaternion t = orientation(s["target"], join(sp, "target"));
        if (!same_rotation(t, current, 1e-6)) {
          throw ConfigError(join(sp, "target"), "hold target differs from the attitude reached so far");
        }
      }
      out.push_back(seg);
      continue;
    }
    if (kind != "slew") throw ConfigError(join(sp, "kind"), "expected hold or slew");

    check_keys(s, sp, {"kind", "label", "axis", "rate_dps", "target", "angle_deg", "duration_s"});
    if (!s.contains("axis")) throw ConfigError(join(sp, "axis"), "required");
    if (!s.contains("rate_dps")) throw ConfigError(join(sp, "rate_dps"), "required");
    const Vec3 axis = unit_vec3(s["axis"], join(sp, "axis"));
    const double rate = positive(s["rate_dps"], join(sp, "rate_dps")) * kDeg;
    if (s.contains("target") == s.contains("angle_deg")) {
      throw ConfigError(sp, "slew needs exactly one of target or angle_deg");
    }
    UnitQuaternion target;
    if (s.contains("target")) {
      target = orientation(s["target"], join(sp, "target"));
    } else {
      const double angle = positive(s["angle_deg"], join(sp, "angle_deg")) * kDeg;
      target = current * axis_angle(axis, angle);
    }
    TrajectorySegment seg;
    try {
      seg = make_slew(current, target, axis, rate, label);
    } catch (const DomainError& e) {
      throw ConfigError(sp, std::string("inconsistent slew: ") + e.what());
    }
    if (s.contains("duration_s")) {
      const double d = positive(s["duration_s"], join(sp, "duration_s"));
      if (std::abs(d - seg.duration) > 1e-6 * std::max(1.0, d)) {
        throw ConfigError(join(sp, "duration_s"),
                          "inconsistent slew: rate * duration_s does not equal the rotation angle (" +
                              std::to_string(seg.duration) + " s expected)");
      }
    }
    current = current * axis_angle(seg.axis, seg.rate * seg.duration);
    out.push_back(seg);
  }
  return out;
}

ReferenceVectors parse_references(const json& j, const std::string& path) {
  check_keys(j, path, {"a_r", "m_r", "inclination_deg", "declination_deg"});
  const Vec3 a_r = j.contains("a_r") ? unit_vec3(j["a_r"], join(path, "a_r")) : kDefaultGravityRef;
  Vec3 m_r(0.8775, 0.0, -0.4795);
  if (j.contains("m_r")) {
    if (j.contains("inclination_deg") || j.contains("declination_deg")) {
      throw ConfigError(path, "give either m_r or inclination_deg/declination_deg, not both");
    }
    m_r = unit_vec3(j["m_r"], join(path, "m_r"));
  } else if (j.contains("inclination_deg") || j.contains("declination_deg")) {
    const double inc = j.contains("inclination_deg") ? number(j["inclination_deg"], join(path, "inclination_deg")) : 0.0;
    const double dec = j.contains("declination_deg") ? number(j["declination_deg"], join(path, "declination_deg")) : 0.0;
    m_r = field_from_inclination(inc, dec);
  }
  try {
    return make_references(a_r, m_r);
  } catch (const Error& e) {
    throw ConfigError(path, e.what());
  }
}

NoiseParams parse_noise(const json& j, const std::string& path, NoiseParams base) {
  check_keys(j, path, {"Q_omega", "R_omega", "R_a", "R_m"});
  if (j.contains("Q_omega")) base.Q_omega = square<3>(j["Q_omega"], join(path, "Q_omega"));
  if (j.contains("R_omega")) base.R_omega = square<3>(j["R_omega"], join(path, "R_omega"));
  if (j.contains("R_a")) base.R_a = square<3>(j["R_a"], join(path, "R_a"));
  if (j.contains("R_m")) base.R_m = square<3>(j["R_m"], join(path, "R_m"));
  try {
    base.validate();
  } catch (const DomainError& e) {
    throw ConfigError(path, e.what());
  }
  return base;
}

DisturbanceModel parse_disturbance(const json& j, const std::string& path,
                                   const std::vector<TrajectorySegment>& segments) {
  check_keys(j, path, {"hard_iron", "soft_iron", "mag_noise_std", "accel_noise_std", "gyro_noise_std",
                       "vibration", "windows"});
  DisturbanceModel d;
  if (j.contains("hard_iron")) d.hard_iron = vec3(j["hard_iron"], join(path, "hard_iron"));
  if (j.contains("soft_iron")) d.soft_iron = square<3>(j["soft_iron"], join(path, "soft_iron"));
  if (j.contains("mag_noise_std")) d.mag_noise_std = non_negative(j["mag_noise_std"], join(path, "mag_noise_std"));
  if (j.contains("accel_noise_std")) d.accel_noise_std = non_negative(j["accel_noise_std"], join(path, "accel_noise_std"));
  if (j.contains("gyro_noise_std")) d.gyro_noise_std = non_negative(j["gyro_noise_std"], join(path, "gyro_noise_std"));
  if (j.contains("vibration")) {
    const json& v = j["vibration"];
    const std::string vp = join(path, "vibration");
    check_keys(v, vp, {"amplitude", "freq_hz"});
    VibrationModel vm;
    if (v.contains("amplitude")) vm.amplitude = non_negative(v["amplitude"], join(vp, "amplitude"));
    if (!v.contains("freq_hz")) throw ConfigError(join(vp, "freq_hz"), "required");
    vm.freq_hz = positive(v["freq_hz"], join(vp, "freq_hz"));
    d.vibration = vm;
  }

  const std::vector<SegmentSpan> spans = segments.empty() ? std::vector<SegmentSpan>{} : segment_spans(segments);
  auto span_of = [&](const json& label, const std::string& p) -> const SegmentSpan& {
    const std::string name = string(label, p);
    for (const auto& s : spans) {
      if (s.label == name) return s;
    }
    throw ConfigError(p, "no trajectory segment labelled '" + name + "'");
  };

  if (j.contains("windows")) {
    const json& ws = j["windows"];
    const std::string wp = join(path, "windows");
    if (!ws.is_array()) throw ConfigError(wp, "expected an array");
    for (std::size_t i = 0; i < ws.size(); ++i) {
      const json& w = ws[i];
      const std::string p = index(wp, i);
      check_keys(w, p, {"t_start_s", "from_segment", "t_end_s", "to_segment", "hard_iron",
                        "vibration_amplitude", "accel_noise_std", "mag_noise_std", "label"});
      DisturbanceWindow win;
      if (w.contains("t_start_s") == w.contains("from_segment")) {
        throw ConfigError(p, "window needs exactly one of t_start_s or from_segment");
      }
      win.t_start = w.contains("t_start_s") ? non_negative(w["t_start_s"], join(p, "t_start_s"))
                                            : span_of(w["from_segment"], join(p, "from_segment")).start;
      if (w.contains("t_end_s") && w.contains("to_segment")) {
        throw ConfigError(p, "give at most one of t_end_s or to_segment");
      }
      win.t_end = INFINITY;
      if (w.contains("t_end_s")) win.t_end = number(w["t_end_s"], join(p, "t_end_s"));
      if (w.contains("to_segment")) win.t_end = span_of(w["to_segment"], join(p, "to_segment")).end;
      if (!(win.t_end > win.t_start)) throw ConfigError(p, "window end must be after its start");
      if (w.contains("hard_iron")) win.hard_iron = vec3(w["hard_iron"], join(p, "hard_iron"));
      if (w.contains("vibration_amplitude")) win.vibration_amplitude = non_negative(w["vibration_amplitude"], join(p, "vibration_amplitude"));
      if (w.contains("accel_noise_std")) win.accel_noise_std = non_negative(w["accel_noise_std"], join(p, "accel_noise_std"));
      if (w.contains("mag_noise_std")) win.mag_noise_std = non_negative(w["mag_noise_std"], join(p, "mag_noise_std"));
      d.windows.push_back(win);
    }
  }
  try {
    d.validate();
  } catch (const DomainError& e) {
    throw ConfigError(path, e.what());
  }
  return d;
}

std::filesystem::path resolve_path(const json& j, const std::string& path, const ParseOptions& opts) {
  std::filesystem::path p = string(j, path);
  if (p.is_relative()) p = opts.base_dir / p;
  p = p.lexically_normal();
  if (opts.check_files && !std::filesystem::exists(p)) {
    throw ConfigError(path, "file does not exist: " + p.string());
  }
  return p;
}

json merge_overrides(json j, const ScenarioOverrides& o) {
  if (o.chart) j["chart"] = *o.chart;
  if (o.modes) j["modes"] = *o.modes;
  if (o.seed) j["seed"] = *o.seed;
  if (o.triad_column) j["triad_column"] = *o.triad_column;
  if (o.init_error_deg) {
    if (!j.contains("initial") || !j["initial"].is_object()) j["initial"] = json::object();
    j["initial"]["init_error_deg"] = *o.init_error_deg;
  }
  return j;
}

}  // namespace

std::string_view mode_id_name(ModeId id) {
  switch (id) {
    case ModeId::Ekf1:
      return "ekf1";
    case ModeId::Ekf2:
      return "ekf2";
    case ModeId::Ekf2RmGtRa:
      return "ekf2-rm-gt-ra";
    case ModeId::Ekf2Triad:
      return "ekf2-triad";
  }
  return "?";
}

ModeId parse_mode_id(std::string_view name) {
  for (ModeId id : {ModeId::Ekf1, ModeId::Ekf2, ModeId::Ekf2RmGtRa, ModeId::Ekf2Triad}) {
    if (mode_id_name(id) == name) return id;
  }
  throw ConfigError("modes", "unknown mode '" + std::string(name) +
                                 "' (valid: ekf1, ekf2, ekf2-rm-gt-ra, ekf2-triad)");
}

MeasurementMode measurement_mode_of(ModeId id) {
  switch (id) {
    case ModeId::Ekf1:
      return MeasurementMode::Ekf1;
    case ModeId::Ekf2Triad:
      return MeasurementMode::Ekf2Triad;
    case ModeId::Ekf2:
    case ModeId::Ekf2RmGtRa:
      break;
  }
  return MeasurementMode::Ekf2;
}

NoiseParams default_noise(ModeId id) {
  NoiseParams n = NoiseParams::isotropic(10.0, 0.001, 0.01, 0.01);
  if (id == ModeId::Ekf2RmGtRa) n.R_m = 0.05 * Mat3::Identity();
  return n;
}

ScenarioConfig parse_scenario(const json& j, const ParseOptions& opts) {
  check_keys(j, "", {"name", "description", "rate_hz", "seed", "chart", "triad_column", "modes",
                     "references", "noise", "initial", "trajectory", "input_log", "truth_log",
                     "disturbance"});
  ScenarioConfig cfg;
  if (j.contains("name")) cfg.name = string(j["name"], "name");
  if (j.contains("description")) string(j["description"], "description");
  if (j.contains("rate_hz")) cfg.rate_hz = positive(j["rate_hz"], "rate_hz");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"].get<long long>() >= 0)) {
      throw ConfigError("seed", "expected a non-negative integer");
    }
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("chart")) cfg.chart = parse_chart(string(j["chart"], "chart"));
  if (j.contains("triad_column")) cfg.triad_column = parse_triad_column(string(j["triad_column"], "triad_column"));

  std::vector<ModeId> ids = {ModeId::Ekf2, ModeId::Ekf2RmGtRa, ModeId::Ekf2Triad};
  if (j.contains("modes")) {
    const json& m = j["modes"];
    if (!m.is_array() || m.empty()) throw ConfigError("modes", "expected a non-empty array of mode names");
    ids.clear();
    for (std::size_t i = 0; i < m.size(); ++i) {
      const ModeId id = parse_mode_id(string(m[i], index("modes", i)));
      for (ModeId seen : ids) {
        if (seen == id) throw ConfigError(index("modes", i), "duplicate mode");
      }
      ids.push_back(id);
    }
  }
  for (ModeId id : ids) cfg.modes.push_back({id, default_noise(id)});
  if (j.contains("noise")) {
    const json& n = j["noise"];
    if (!n.is_object()) throw ConfigError("noise", "expected an object keyed by mode name");
    for (const auto& [key, value] : n.items()) {
      const ModeId id = parse_mode_id(key);
      for (auto& spec : cfg.modes) {
        if (spec.id == id) spec.noise = parse_noise(value, join("noise", key), spec.noise);
      }
    }
  }

  cfg.refs = parse_references(j.contains("references") ? j["references"] : json::object(), "references");

  if (j.contains("trajectory") == j.contains("input_log")) {
    throw ConfigError("", "exactly one of trajectory or input_log is required");
  }
  if (j.contains("trajectory")) {
    cfg.segments = parse_trajectory(j["trajectory"], "trajectory");
    if (j.contains("truth_log")) throw ConfigError("truth_log", "only valid together with input_log");
  } else {
    cfg.input_log = resolve_path(j["input_log"], "input_log", opts);
    if (j.contains("truth_log")) cfg.truth_log = resolve_path(j["truth_log"], "truth_log", opts);
  }

  if (j.contains("disturbance")) {
    cfg.disturbance = parse_disturbance(j["disturbance"], "disturbance", cfg.segments);
  }

  if (j.contains("initial")) {
    const json& init = j["initial"];
    check_keys(init, "initial", {"P0", "init_error_deg", "init_error_axis"});
    if (init.contains("P0")) {
      cfg.P0 = square<6>(init["P0"], "initial.P0");
      if (!is_symmetric_psd(cfg.P0)) throw ConfigError("initial.P0", "must be symmetric positive semidefinite");
    }
    if (init.contains("init_error_deg")) cfg.init_error_deg = non_negative(init["init_error_deg"], "initial.init_error_deg");
    if (init.contains("init_error_axis")) cfg.init_error_axis = unit_vec3(init["init_error_axis"], "initial.init_error_axis");
  }

  cfg.echo = j;
  if (cfg.input_log) cfg.echo["input_log"] = cfg.input_log->string();
  if (cfg.truth_log) cfg.echo["truth_log"] = cfg.truth_log->string();
  return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path, const ScenarioOverrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError("", path.string() + ": " + e.what());
  }
  ParseOptions opts;
  opts.base_dir = std::filesystem::absolute(path).parent_path();
  return parse_scenario(merge_overrides(std::move(j), overrides), opts);
}

ScenarioConfig apply_overrides(const ScenarioConfig& cfg, const ScenarioOverrides& overrides) {
  ParseOptions opts;
  opts.check_files = false;
  return parse_scenario(merge_overrides(cfg.echo, overrides), opts);
}

std::filesystem::path preset_dir() {
  if (const char* env = std::getenv("MANIFOLD_AHRS_PRESETS"); env != nullptr && *env != '\0') {
    return env;
  }
  return MAHRS_DEFAULT_PRESET_DIR;
}

std::filesystem::path resolve_config(const std::string& name_or_path) {
  const std::filesystem::path direct = name_or_path;
  if (std::filesystem::is_regular_file(direct)) return direct;
  const std::filesystem::path preset = preset_dir() / (name_or_path + ".json");
  if (std::filesystem::is_regular_file(preset)) return preset;
  throw ConfigError("config", "no config file or preset named '" + name_or_path + "' (looked in " +
                                  preset_dir().string() + ")");
}

}  // namespace mahrs
