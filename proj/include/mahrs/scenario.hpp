#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mahrs/charts.hpp"
#include "mahrs/mekf.hpp"
#include "mahrs/references.hpp"
#include "mahrs/sim.hpp"
#include "mahrs/triad.hpp"

namespace mahrs {

/// Filter variants a scenario can run. Ekf2RmGtRa is Ekf2 with a larger
/// magnetometer covariance (R_m = 0.05 I by default).
enum class ModeId { Ekf1, Ekf2, Ekf2RmGtRa, Ekf2Triad };

std::string_view mode_id_name(ModeId id);  // ekf1 | ekf2 | ekf2-rm-gt-ra | ekf2-triad
ModeId parse_mode_id(std::string_view name);
MeasurementMode measurement_mode_of(ModeId id);
NoiseParams default_noise(ModeId id);

struct ModeSpec {
  ModeId id = ModeId::Ekf2;
  NoiseParams noise;
  std::string name() const { return std::string(mode_id_name(id)); }
};

/// Everything needed to reproduce a run. Either `segments` (simulated) or
/// `input_log` (ingested) describes the stream.
struct ScenarioConfig {
  std::string name;
  std::vector<TrajectorySegment> segments;
  std::optional<std::filesystem::path> input_log;
  std::optional<std::filesystem::path> truth_log;
  DisturbanceModel disturbance;
  ReferenceVectors refs;
  std::vector<ModeSpec> modes;
  ChartKind chart = ChartKind::ModifiedRodriguesParams;
  double rate_hz = 500.0;
  std::uint64_t seed = 1;
  TriadColumn triad_column = TriadColumn::C3;
  Mat6 P0 = 0.1 * Mat6::Identity();
  double init_error_deg = 0.0;
  Vec3 init_error_axis = Vec3(1.0, 1.0, 1.0).normalized();

  /// Normalized JSON form of the configuration (overrides applied, file
  /// paths absolute). Re-parsing it reproduces this config.
  nlohmann::json echo;
};

/// Command-line adjustments applied on top of a loaded configuration.
struct ScenarioOverrides {
  std::optional<std::string> chart;
  std::optional<std::vector<std::string>> modes;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> triad_column;
  std::optional<double> init_error_deg;
};

struct ParseOptions {
  /// Resolve relative input paths against this directory.
  std::filesystem::path base_dir = ".";
  /// Require referenced files to exist.
  bool check_files = true;
};

/// Builds a config from JSON; unknown keys and bad values raise ConfigError
/// carrying the key path (e.g. "trajectory.segments[3].rate_dps").
ScenarioConfig parse_scenario(const nlohmann::json& j, const ParseOptions& opts = {});

ScenarioConfig load_scenario(const std::filesystem::path& path,
                             const ScenarioOverrides& overrides = {});

/// Re-parses `cfg.echo` with the overrides merged in.
ScenarioConfig apply_overrides(const ScenarioConfig& cfg, const ScenarioOverrides& overrides);

/// Directory holding the shipped presets: $MANIFOLD_AHRS_PRESETS if set,
/// otherwise the source tree's presets/ directory.
std::filesystem::path preset_dir();

/// A path to an existing file is returned as-is; otherwise `name` is looked
/// up as `<preset_dir>/<name>.json`. Throws ConfigError if neither exists.
std::filesystem::path resolve_config(const std::string& name_or_path);

}  // namespace mahrs
