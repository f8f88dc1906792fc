#include "mahrs/commands.hpp"

#include <ostream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mahrs/errors.hpp"
#include "mahrs/harness.hpp"
#include "mahrs/log_io.hpp"

namespace mahrs {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void prepare_outputs(const fs::path& dir, const std::vector<fs::path>& files, bool force) {
  fs::create_directories(dir);
  if (force) return;
  for (const auto& f : files) {
    if (fs::exists(f)) throw Error(f.string() + " already exists (use --force to overwrite)");
  }
}

std::string config_comment(const ScenarioConfig& cfg) { return "config: " + cfg.echo.dump(); }

json spans_json(const std::vector<SegmentSpan>& spans) {
  json a = json::array();
  for (const auto& s : spans) a.push_back({s.start, s.end, segment_kind_name(s.kind), s.label});
  return a;
}

std::vector<SegmentSpan> spans_from_json(const json& a) {
  std::vector<SegmentSpan> out;
  for (const auto& s : a) {
    const std::string kind = s.at(2).get<std::string>();
    if (kind != "hold" && kind != "slew") throw std::invalid_argument("bad segment kind");
    out.push_back({s.at(0).get<double>(), s.at(1).get<double>(),
                   kind == "hold" ? SegmentKind::Hold : SegmentKind::Slew, s.at(3).get<std::string>()});
  }
  return out;
}

const std::string* find_meta(const std::vector<std::string>& comments, const std::string& key) {
  const std::string prefix = key + ": ";
  for (const auto& c : comments) {
    if (c.rfind(prefix, 0) == 0) return &c;
  }
  return nullptr;
}

std::string meta_value(const std::string& line, const std::string& key) { return line.substr(key.size() + 2); }

bool same_layout(const std::vector<SegmentSpan>& a, const std::vector<SegmentSpan>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].label != b[i].label || a[i].kind != b[i].kind || a[i].start != b[i].start || a[i].end != b[i].end) {
      return false;
    }
  }
  return true;
}

}  // namespace

ScenarioConfig resolve_scenario(const CommandOptions& opts) {
  if (opts.truth && !opts.log) throw ConfigError("truth", "--truth requires --log");
  if (!opts.config && !opts.log) throw ConfigError("config", "either --config or --log is required");

  json j = json::object();
  if (opts.config) {
    const ScenarioConfig base = load_scenario(resolve_config(*opts.config), opts.overrides);
    if (!opts.log) return base;
    j = base.echo;
    j.erase("trajectory");
    j.erase("disturbance");
    j.erase("truth_log");
  } else {
    j["name"] = opts.log->stem().string();
  }
  j["input_log"] = fs::absolute(*opts.log).lexically_normal().string();
  if (opts.truth) j["truth_log"] = fs::absolute(*opts.truth).lexically_normal().string();
  const ScenarioConfig cfg = parse_scenario(j);
  return opts.config ? cfg : apply_overrides(cfg, opts.overrides);
}

int cmd_simulate(const CommandOptions& opts, std::ostream& out) {
  const ScenarioConfig cfg = resolve_scenario(opts);
  if (cfg.segments.empty()) throw ConfigError("trajectory", "simulate needs a config with a trajectory");

  const std::vector<GroundTruthSample> truth = generate_trajectory(cfg.segments, cfg.rate_hz);
  const std::vector<Measurement> stream = synthesize_measurements(truth, cfg.refs, cfg.disturbance, cfg.seed);

  const fs::path sensors = opts.out / "sensors.csv";
  const fs::path truth_path = opts.out / "truth.csv";
  prepare_outputs(opts.out, {sensors, truth_path}, opts.force);

  const std::vector<std::string> comments = {config_comment(cfg), "seed: " + std::to_string(cfg.seed),
                                             "samples: " + std::to_string(stream.size())};
  std::ostringstream s;
  write_sensor_log(s, stream, comments);
  std::ostringstream t;
  write_truth_log(t, truth, comments);
  write_file(sensors, s.str(), true);
  write_file(truth_path, t.str(), true);
  out << "wrote " << sensors.string() << " and " << truth_path.string() << " (" << stream.size()
      << " samples)\n";
  return kExitOk;
}

std::string metrics_file_text(const std::string& config_echo, const std::string& label,
                              std::size_t samples, const std::vector<SegmentSpan>& spans,
                              const std::vector<MetricsRecord>& records,
                              const std::optional<std::string>& error) {
  std::vector<std::string> comments = {"config: " + config_echo,
                                       "mode: " + label,
                                       "samples: " + std::to_string(samples),
                                       "records: " + std::to_string(records.size()),
                                       "segments: " + spans_json(spans).dump()};
  if (error) comments.push_back("error: " + *error);
  std::ostringstream os;
  write_metrics(os, records, comments);
  return os.str();
}

int cmd_run(const CommandOptions& opts, std::ostream& out) {
  const ScenarioConfig cfg = resolve_scenario(opts);

  std::vector<fs::path> files;
  for (const ModeSpec& m : cfg.modes) files.push_back(opts.out / ("metrics_" + m.name() + ".csv"));
  const fs::path summary = opts.out / "summary.txt";
  files.push_back(summary);
  prepare_outputs(opts.out, files, opts.force);

  const ScenarioResult result = run_scenario(cfg);
  const std::string echo = cfg.echo.dump();
  bool failed = false;
  for (std::size_t i = 0; i < result.runs.size(); ++i) {
    const ModeRun& r = result.runs[i];
    failed = failed || r.error.has_value();
    write_file(files[i],
               metrics_file_text(echo, r.spec.name(), result.stream.measurements.size(), result.stream.spans,
                                 r.records, r.error),
               true);
  }
  write_file(summary, result.summary_text, true);
  out << result.summary_text;
  return failed ? kExitModeFailed : kExitOk;
}

MetricsArtifact read_metrics_artifact(const fs::path& path) {
  const std::string source = path.string();
  MetricsFile file = read_metrics(path);
  MetricsArtifact a;
  auto need = [&](const std::string& key) {
    const std::string* line = find_meta(file.comments, key);
    if (line == nullptr) throw ParseError(source, 0, "missing '# " + key + ":' comment");
    return meta_value(*line, key);
  };
  auto count = [&](const std::string& key) {
    const std::string v = need(key);
    std::size_t pos = 0;
    unsigned long long n = 0;
    try {
      n = std::stoull(v, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != v.size()) throw ParseError(source, 0, "'# " + key + ":' is not a count: " + v);
    return static_cast<std::size_t>(n);
  };

  a.label = need("mode");
  a.samples = count("samples");
  const std::size_t expected = count("records");
  try {
    a.spans = spans_from_json(json::parse(need("segments")));
  } catch (const std::exception& e) {
    if (dynamic_cast<const ParseError*>(&e) != nullptr) throw;
    throw ParseError(source, 0, std::string("malformed '# segments:' comment: ") + e.what());
  }
  if (const std::string* e = find_meta(file.comments, "error")) a.error = meta_value(*e, "error");
  if (file.records.size() != expected) {
    throw ParseError(source, 0,
                     "row count mismatch: header declares " + std::to_string(expected) + " records, file has " +
                         std::to_string(file.records.size()));
  }
  if (!a.error && expected != a.samples) {
    throw ParseError(source, 0,
                     "row count mismatch: " + std::to_string(expected) + " records for " +
                         std::to_string(a.samples) + " samples");
  }
  a.records = std::move(file.records);
  return a;
}

int cmd_evaluate(const std::vector<fs::path>& metrics_files, const CommandOptions& opts, std::ostream& out) {
  if (metrics_files.empty()) throw ConfigError("metrics", "at least one metrics file is required");

  std::vector<MetricsArtifact> arts;
  for (const auto& p : metrics_files) arts.push_back(read_metrics_artifact(p));

  // Same mode from several runs: qualify labels by their run directory.
  std::set<std::string> seen;
  bool duplicate = false;
  for (const auto& a : arts) duplicate = !seen.insert(a.label).second || duplicate;
  if (duplicate) {
    for (std::size_t i = 0; i < arts.size(); ++i) {
      const fs::path dir = fs::absolute(metrics_files[i]).parent_path().filename();
      arts[i].label = dir.string() + "/" + arts[i].label;
    }
  }

  for (std::size_t i = 1; i < arts.size(); ++i) {
    if (!same_layout(arts[0].spans, arts[i].spans)) {
      throw ParseError(metrics_files[i].string(), 0, "segment layout differs from " + metrics_files[0].string());
    }
  }

  if (opts.truth) {
    const std::vector<TruthRow> truth = read_truth_log(*opts.truth);
    for (std::size_t i = 0; i < arts.size(); ++i) {
      const std::string src = metrics_files[i].string();
      if (arts[i].samples != truth.size()) {
        throw ParseError(src, 0,
                         "row count mismatch with truth log: " + std::to_string(arts[i].samples) + " samples vs " +
                             std::to_string(truth.size()) + " truth rows");
      }
      for (std::size_t k = 0; k < arts[i].records.size(); ++k) {
        if (std::abs(arts[i].records[k].t - truth[k].t) > 1e-9) {
          throw ParseError(src, 0, "timestamp of record " + std::to_string(k + 1) + " differs from the truth log");
        }
      }
    }
  }

  std::vector<ModeSummary> summaries;
  for (const auto& a : arts) {
    ModeSummary s = summarize(a.label, a.records, a.spans);
    s.error = a.error;
    summaries.push_back(std::move(s));
  }
  const std::string text = format_summary(summaries, arts[0].spans);
  if (!opts.out.empty() && opts.out != ".") {
    const fs::path summary = opts.out / "summary.txt";
    prepare_outputs(opts.out, {summary}, opts.force);
    write_file(summary, text, true);
  }
  out << text;
  return kExitOk;
}

int cmd_calibrate(const CommandOptions& opts, std::ostream& out) {
  const ScenarioConfig cfg = resolve_scenario(opts);
  const ScenarioStream stream = build_stream(cfg);
  const ReferenceVectors refs = calibrate_references(stream.measurements);

  const fs::path path = opts.out / "references.json";
  prepare_outputs(opts.out, {path}, opts.force);
  const json j = {{"a_r", {refs.a_r.x(), refs.a_r.y(), refs.a_r.z()}},
                  {"m_r", {refs.m_r.x(), refs.m_r.y(), refs.m_r.z()}}};
  write_file(path, j.dump(2) + "\n", true);
  out << j.dump(2) << "\n";
  return kExitOk;
}

}  // namespace mahrs
