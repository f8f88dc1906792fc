#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mahrs/mekf.hpp"
#include "mahrs/metrics.hpp"
#include "mahrs/scenario.hpp"
#include "mahrs/sim.hpp"

namespace mahrs {

/// The measurement stream every mode of a scenario consumes, with optional
/// ground truth (one attitude per measurement) and the segment layout.
struct ScenarioStream {
  std::vector<Measurement> measurements;
  std::vector<UnitQuaternion> truth;  // empty when unknown
  std::vector<SegmentSpan> spans;
};

/// Simulates (trajectory configs) or ingests (log configs) the stream.
ScenarioStream build_stream(const ScenarioConfig& cfg);

/// Initial filter attitude: the first true attitude (identity without truth)
/// rotated by init_error_deg about init_error_axis.
UnitQuaternion initial_attitude(const ScenarioConfig& cfg, const ScenarioStream& stream);

struct ModeRun {
  ModeSpec spec;
  std::vector<MetricsRecord> records;
  std::optional<FilterState> final_state;
  /// Set when a step threw; records stop at the failing sample.
  std::optional<std::string> error;
};

/// Runs one mode over the stream. Errors from filter steps are caught and
/// recorded in the result.
ModeRun run_filter(const ScenarioConfig& cfg, const ScenarioStream& stream, const ModeSpec& spec);

struct ScenarioResult {
  ScenarioStream stream;
  std::vector<ModeRun> runs;
  std::vector<ModeSummary> summaries;
  std::string summary_text;
};

/// Runs every configured mode on one shared stream, in parallel.
ScenarioResult run_scenario(const ScenarioConfig& cfg);

/// Minimum number of samples accepted by calibrate_references.
inline constexpr std::size_t kMinCalibrationSamples = 100;

/// Reference directions from a static stream: normalized means of z_a and
/// z_m. Throws DomainError for short streams, missing magnetometer samples or
/// a mean direction norm below 0.5 (the sensor was not static).
ReferenceVectors calibrate_references(const std::vector<Measurement>& static_stream);

}  // namespace mahrs
