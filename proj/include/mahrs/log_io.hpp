#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "mahrs/mekf.hpp"
#include "mahrs/metrics.hpp"
#include "mahrs/sim.hpp"

namespace mahrs {

inline constexpr const char* kSensorLogHeader = "t_s,gx_rads,gy_rads,gz_rads,ax,ay,az,mx,my,mz";
inline constexpr const char* kTruthLogHeader = "t_s,qw,qx,qy,qz";
inline constexpr const char* kMetricsHeader =
    "t_s,rot_err_deg,rot_angle_deg,residual_norm,p_trace,yaw_err_deg,pitch_err_deg,roll_err_deg";

/// Shortest text that parses back to exactly `v`.
std::string format_double(double v);

/// A parsed CSV file: leading `#` comment lines (prefix stripped) and rows
/// keyed by the header's column names.
struct CsvTable {
  std::vector<std::string> comments;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based source line of each row

  /// Index of a column; throws ParseError naming the column if absent.
  std::size_t column(const std::string& name, const std::string& source) const;
};

/// Reads a CSV whose header must contain every name in `required`. Rows with
/// a field count different from the header raise ParseError with the line.
CsvTable read_csv(const std::filesystem::path& path, const std::vector<std::string>& required);

/// Writes comment lines as `# text`.
void write_comments(std::ostream& os, const std::vector<std::string>& comments);

void write_sensor_log(std::ostream& os, const std::vector<Measurement>& stream,
                      const std::vector<std::string>& comments = {});
void write_truth_log(std::ostream& os, const std::vector<GroundTruthSample>& truth,
                     const std::vector<std::string>& comments = {});
void write_metrics(std::ostream& os, const std::vector<MetricsRecord>& records,
                   const std::vector<std::string>& comments = {});

/// Sensor log to a normalized measurement stream. Accel and mag columns may
/// be in any consistent scale; empty mag fields mean "no magnetometer".
/// Throws ParseError for malformed rows and non-increasing time.
std::vector<Measurement> ingest_log(const std::filesystem::path& path);

struct TruthRow {
  double t = 0.0;
  UnitQuaternion q;
};
std::vector<TruthRow> read_truth_log(const std::filesystem::path& path);

struct MetricsFile {
  std::vector<std::string> comments;
  std::vector<MetricsRecord> records;
};
MetricsFile read_metrics(const std::filesystem::path& path);

/// Writes `content` to `path`; refuses to replace an existing file unless
/// `force` is set.
void write_file(const std::filesystem::path& path, const std::string& content, bool force);

}  // namespace mahrs
