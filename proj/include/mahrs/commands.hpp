#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mahrs/metrics.hpp"
#include "mahrs/scenario.hpp"

namespace mahrs {

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;      // bad config, unreadable input, refused overwrite
inline constexpr int kExitUsage = 2;      // missing or conflicting arguments
inline constexpr int kExitModeFailed = 3; // outputs written, but a mode aborted

struct CommandOptions {
  std::optional<std::string> config;  // path or preset name
  std::optional<std::filesystem::path> log;
  std::optional<std::filesystem::path> truth;
  std::filesystem::path out = ".";
  ScenarioOverrides overrides;
  bool force = false;
};

/// Loads the scenario named by opts.config and/or opts.log. A log without a
/// config runs with default settings; a log with a config replaces the
/// config's stream source.
ScenarioConfig resolve_scenario(const CommandOptions& opts);

/// sensors.csv + truth.csv for a trajectory config.
int cmd_simulate(const CommandOptions& opts, std::ostream& out);

/// metrics_<mode>.csv for every mode plus summary.txt; the summary is also
/// printed to `out`.
int cmd_run(const CommandOptions& opts, std::ostream& out);

/// Recomputes the summary from metrics files written by cmd_run. With
/// opts.truth, the metrics time base is checked against the truth log. When
/// opts.out is non-empty the summary is also written to <out>/summary.txt.
int cmd_evaluate(const std::vector<std::filesystem::path>& metrics_files, const CommandOptions& opts,
                 std::ostream& out);

/// references.json from the static stream of a log or config.
int cmd_calibrate(const CommandOptions& opts, std::ostream& out);

/// Persisted form of one mode's metrics, as read back by cmd_evaluate.
struct MetricsArtifact {
  std::string label;
  std::optional<std::string> error;
  std::size_t samples = 0;
  std::vector<SegmentSpan> spans;
  std::vector<MetricsRecord> records;
};

std::string metrics_file_text(const std::string& config_echo, const std::string& label,
                              std::size_t samples, const std::vector<SegmentSpan>& spans,
                              const std::vector<MetricsRecord>& records,
                              const std::optional<std::string>& error);

/// Throws ParseError for a missing metadata comment or a row-count mismatch.
MetricsArtifact read_metrics_artifact(const std::filesystem::path& path);

}  // namespace mahrs
