#include "mahrs/log_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "mahrs/errors.hpp"

namespace mahrs {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      out.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  out.push_back(field);
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& text, const std::string& source, std::size_t line,
                    const std::string& column) {
  const std::string f = trim(text);
  double v = 0.0;
  const auto* begin = f.data();
  const auto* end = f.data() + f.size();
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (f.empty() || ec != std::errc() || ptr != end) {
    throw ParseError(source, line, "column '" + column + "': not a number: '" + f + "'");
  }
  return v;
}

void write_row(std::ostream& os, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) os << ',';
    os << format_double(v);
    first = false;
  }
  os << '\n';
}

void check_monotone(const std::string& source, std::size_t line, double prev, double t, bool has_prev) {
  if (has_prev && !(t > prev)) {
    throw ParseError(source, line,
                     "timestamps must be strictly increasing (" + format_double(t) +
                         " after " + format_double(prev) + ")");
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

std::size_t CsvTable::column(const std::string& name, const std::string& source) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  throw ParseError(source, 0, "missing column '" + name + "'");
}

CsvTable read_csv(const std::filesystem::path& path, const std::vector<std::string>& required) {
  const std::string source = path.string();
  std::ifstream in(path);
  if (!in) throw ParseError(source, 0, "cannot open file");

  CsvTable table;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::string c = line.substr(1);
      if (!c.empty() && c.front() == ' ') c.erase(0, 1);
      table.comments.push_back(c);
      continue;
    }
    if (!have_header) {
      for (auto& f : split(line)) table.columns.push_back(trim(f));
      have_header = true;
      for (const auto& name : required) table.column(name, source);
      continue;
    }
    auto fields = split(line);
    if (fields.size() != table.columns.size()) {
      throw ParseError(source, lineno,
                       "expected " + std::to_string(table.columns.size()) + " fields, got " +
                           std::to_string(fields.size()));
    }
    table.rows.push_back(std::move(fields));
    table.line_numbers.push_back(lineno);
  }
  if (!have_header) throw ParseError(source, 0, "missing header line");
  return table;
}

void write_comments(std::ostream& os, const std::vector<std::string>& comments) {
  for (const auto& c : comments) os << "# " << c << '\n';
}

void write_sensor_log(std::ostream& os, const std::vector<Measurement>& stream,
                      const std::vector<std::string>& comments) {
  write_comments(os, comments);
  os << kSensorLogHeader << '\n';
  for (const auto& m : stream) {
    os << format_double(m.t);
    for (double v : {m.z_omega.x(), m.z_omega.y(), m.z_omega.z(), m.z_a.x(), m.z_a.y(), m.z_a.z()}) {
      os << ',' << format_double(v);
    }
    if (m.z_m) {
      for (double v : {m.z_m->x(), m.z_m->y(), m.z_m->z()}) os << ',' << format_double(v);
    } else {
      os << ",,,";
    }
    os << '\n';
  }
}

void write_truth_log(std::ostream& os, const std::vector<GroundTruthSample>& truth,
                     const std::vector<std::string>& comments) {
  write_comments(os, comments);
  os << kTruthLogHeader << '\n';
  for (const auto& g : truth) {
    write_row(os, {g.t, g.q_true.w(), g.q_true.vec().x(), g.q_true.vec().y(), g.q_true.vec().z()});
  }
}

void write_metrics(std::ostream& os, const std::vector<MetricsRecord>& records,
                   const std::vector<std::string>& comments) {
  write_comments(os, comments);
  os << kMetricsHeader << '\n';
  for (const auto& r : records) {
    write_row(os, {r.t, r.rot_err_deg, r.rot_angle_deg, r.residual_norm, r.p_trace, r.yaw_err_deg,
                   r.pitch_err_deg, r.roll_err_deg});
  }
}

std::vector<Measurement> ingest_log(const std::filesystem::path& path) {
  static const std::vector<std::string> cols = {"t_s", "gx_rads", "gy_rads", "gz_rads", "ax",
                                                "ay",  "az",      "mx",      "my",      "mz"};
  const std::string source = path.string();
  const CsvTable table = read_csv(path, cols);
  std::vector<std::size_t> idx;
  for (const auto& c : cols) idx.push_back(table.column(c, source));

  std::vector<Measurement> out;
  out.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t line = table.line_numbers[r];
    auto num = [&](std::size_t k) { return parse_double(row[idx[k]], source, line, cols[k]); };
    const double t = num(0);
    const Vec3 gyro(num(1), num(2), num(3));
    const Vec3 accel(num(4), num(5), num(6));

    std::optional<Vec3> mag;
    const bool mag_empty = trim(row[idx[7]]).empty() && trim(row[idx[8]]).empty() &&
                           trim(row[idx[9]]).empty();
    if (!mag_empty) mag = Vec3(num(7), num(8), num(9));

    check_monotone(source, line, out.empty() ? 0.0 : out.back().t, t, !out.empty());
    try {
      out.push_back(Measurement::make(t, gyro, accel, mag));
    } catch (const DomainError& e) {
      throw ParseError(source, line, e.what());
    }
  }
  return out;
}

std::vector<TruthRow> read_truth_log(const std::filesystem::path& path) {
  static const std::vector<std::string> cols = {"t_s", "qw", "qx", "qy", "qz"};
  const std::string source = path.string();
  const CsvTable table = read_csv(path, cols);
  std::vector<std::size_t> idx;
  for (const auto& c : cols) idx.push_back(table.column(c, source));

  std::vector<TruthRow> out;
  out.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const std::size_t line = table.line_numbers[r];
    auto num = [&](std::size_t k) { return parse_double(table.rows[r][idx[k]], source, line, cols[k]); };
    const double t = num(0);
    check_monotone(source, line, out.empty() ? 0.0 : out.back().t, t, !out.empty());
    try {
      out.push_back({t, UnitQuaternion(num(1), num(2), num(3), num(4))});
    } catch (const DomainError& e) {
      throw ParseError(source, line, e.what());
    }
  }
  return out;
}

MetricsFile read_metrics(const std::filesystem::path& path) {
  static const std::vector<std::string> cols = {"t_s",      "rot_err_deg", "rot_angle_deg",
                                                "residual_norm", "p_trace", "yaw_err_deg",
                                                "pitch_err_deg", "roll_err_deg"};
  const std::string source = path.string();
  const CsvTable table = read_csv(path, cols);
  std::vector<std::size_t> idx;
  for (const auto& c : cols) idx.push_back(table.column(c, source));

  MetricsFile out;
  out.comments = table.comments;
  out.records.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const std::size_t line = table.line_numbers[r];
    auto num = [&](std::size_t k) { return parse_double(table.rows[r][idx[k]], source, line, cols[k]); };
    MetricsRecord m;
    m.t = num(0);
    m.rot_err_deg = num(1);
    m.rot_angle_deg = num(2);
    m.residual_norm = num(3);
    m.p_trace = num(4);
    m.yaw_err_deg = num(5);
    m.pitch_err_deg = num(6);
    m.roll_err_deg = num(7);
    out.records.push_back(m);
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content, bool force) {
  if (!force && std::filesystem::exists(path)) {
    throw Error(path.string() + " already exists (use --force to overwrite)");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace mahrs
