#include <iostream>

#include <CLI11.hpp>

#include "mahrs/commands.hpp"
#include "mahrs/errors.hpp"

namespace {

struct Flags {
  std::string config;
  std::string log;
  std::string truth;
  std::string out = ".";
  std::string chart;
  std::vector<std::string> modes;
  std::string triad_column;
  std::uint64_t seed = 0;
  double init_error_deg = 0.0;
  bool force = false;
};

void add_common(CLI::App* cmd, Flags& f, bool stream_flags) {
  cmd->add_option("--config", f.config, "Scenario config file or preset name");
  cmd->add_option("--out", f.out, "Output directory (created if absent)");
  cmd->add_flag("--force", f.force, "Overwrite existing output files");
  if (!stream_flags) return;
  cmd->add_option("--chart", f.chart, "orthographic | rodrigues | mrp | rotation-vector");
  cmd->add_option("--modes", f.modes, "Comma-separated: ekf1,ekf2,ekf2-rm-gt-ra,ekf2-triad")->delimiter(',');
  cmd->add_option("--seed", f.seed, "Random seed for simulated streams");
  cmd->add_option("--triad-column", f.triad_column, "TRIAD column used by ekf2-triad: c2 | c3");
  cmd->add_option("--init-error-deg", f.init_error_deg, "Initial attitude error of the filter (deg)");
}

mahrs::CommandOptions to_options(const CLI::App& cmd, const Flags& f) {
  mahrs::CommandOptions o;
  if (!f.config.empty()) o.config = f.config;
  if (!f.log.empty()) o.log = f.log;
  if (!f.truth.empty()) o.truth = f.truth;
  o.out = f.out;
  o.force = f.force;
  if (!f.chart.empty()) o.overrides.chart = f.chart;
  if (!f.modes.empty()) o.overrides.modes = f.modes;
  if (!f.triad_column.empty()) o.overrides.triad_column = f.triad_column;
  if (cmd.get_option_no_throw("--seed") != nullptr && cmd.count("--seed") > 0) o.overrides.seed = f.seed;
  if (cmd.get_option_no_throw("--init-error-deg") != nullptr && cmd.count("--init-error-deg") > 0) {
    o.overrides.init_error_deg = f.init_error_deg;
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Attitude estimation on unit quaternions: simulate, run, evaluate, calibrate"};
  app.require_subcommand(1);
  Flags f;
  std::vector<std::string> metrics_files;

  CLI::App* simulate = app.add_subcommand("simulate", "Write sensors.csv and truth.csv from a trajectory config");
  add_common(simulate, f, true);

  CLI::App* run = app.add_subcommand("run", "Run filter modes and write metrics_<mode>.csv and summary.txt");
  add_common(run, f, true);
  run->add_option("--log", f.log, "Sensor log CSV to run on instead of a simulated stream");
  run->add_option("--truth", f.truth, "Ground-truth CSV matching --log");

  CLI::App* evaluate = app.add_subcommand("evaluate", "Recompute the summary from metrics files");
  evaluate->add_option("metrics", metrics_files, "metrics_<mode>.csv files")->required();
  evaluate->add_option("--truth", f.truth, "Ground-truth CSV to check the time base against");
  evaluate->add_option("--out", f.out, "Also write summary.txt here");
  evaluate->add_flag("--force", f.force, "Overwrite an existing summary.txt");

  CLI::App* calibrate = app.add_subcommand("calibrate", "Estimate reference directions from a static stream");
  add_common(calibrate, f, true);
  calibrate->add_option("--log", f.log, "Static sensor log CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : mahrs::kExitUsage;
  }

  try {
    if (simulate->parsed()) {
      if (f.config.empty()) {
        std::cerr << "simulate: --config is required\n" << simulate->help();
        return mahrs::kExitUsage;
      }
      return mahrs::cmd_simulate(to_options(*simulate, f), std::cout);
    }
    if (run->parsed()) {
      if (f.config.empty() && f.log.empty()) {
        std::cerr << "run: --config or --log is required\n" << run->help();
        return mahrs::kExitUsage;
      }
      return mahrs::cmd_run(to_options(*run, f), std::cout);
    }
    if (evaluate->parsed()) {
      return mahrs::cmd_evaluate({metrics_files.begin(), metrics_files.end()}, to_options(*evaluate, f), std::cout);
    }
    if (calibrate->parsed()) {
      if (f.config.empty() && f.log.empty()) {
        std::cerr << "calibrate: --config or --log is required\n" << calibrate->help();
        return mahrs::kExitUsage;
      }
      return mahrs::cmd_calibrate(to_options(*calibrate, f), std::cout);
    }
  } catch (const mahrs::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return mahrs::kExitError;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return mahrs::kExitError;
  }
  return mahrs::kExitUsage;
}
