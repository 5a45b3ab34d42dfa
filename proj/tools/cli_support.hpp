#pragma once

// Pieces of the mcpsim command-line tool that do not depend on argument
// parsing: configuration records and headers, lambda_c presets, and the
// threshold sweep. Everything here talks to the library through the C API.

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mcpsim/mcpsim.h"

namespace mcpsim_cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitDomain = 2,
  kExitViolation = 3,
  kExitResource = 4,
  kExitIo = 5,
};

int exit_code_for(mcpsim_status status);

// %.17g, enough to reproduce any double exactly.
std::string exact(double v);
// %.12g, the CSV precision.
std::string csv_number(double v);

// Ordered key/value record of a run's resolved settings. Its header form
// leads every output file and can be fed back through --config.
class ExperimentConfig {
public:
  ExperimentConfig(std::string command) : command_(std::move(command)) {}

  void set(const std::string& key, std::string value);
  void set(const std::string& key, double value) { set(key, exact(value)); }
  void set_int(const std::string& key, long long value) { set(key, std::to_string(value)); }

  const std::string& command() const noexcept { return command_; }
  const std::vector<std::pair<std::string, std::string>>& entries() const noexcept {
    return entries_;
  }

  // "# mcpsim <version>\n# command=<cmd>\n# key=value\n..."
  std::string csv_header() const;
  // {"tool": "mcpsim", "version": ..., "command": ..., "config": {...}}
  std::string json_header_object() const;

private:
  std::string command_;
  std::vector<std::pair<std::string, std::string>> entries_;
};

// Reads key=value settings from a config file or a previous output file.
// Text: lines "key=value" or "# key=value"; lines without '=' are skipped,
// CSV data rows stop the scan. JSON: the "header.config" object.
std::vector<std::pair<std::string, std::string>> parse_config_text(std::string_view text);

// Rebuilds an argument vector: program, subcommand, one --key=value per config
// entry, then the remaining user arguments (later flags win). Throws
// std::runtime_error when a config's recorded command differs from the
// requested one.
std::vector<std::string> merge_config_args(const std::vector<std::string>& args);

// lower -> 1/(2d-1), upper -> 2/d, literature -> external numerical estimates
// (d <= 3), otherwise a positive number.
double resolve_lambda_c(std::string_view spec, int dim);

struct Axis {
  std::string name;  // c, alpha or beta
  double min = 0.0;
  double max = 0.0;
  int steps = 2;
  bool log = false;

  std::vector<double> values() const;
};

// "name:min:max:steps[:lin|log]"
Axis parse_axis(std::string_view spec);

struct SweepGrid {
  std::vector<Axis> axes;  // up to two, distinct
  double beta = 4.0;
  double c = 6.0;
  double alpha = 8.0;
  int dim = 1;
  double lambda_c_ref = 2.0;

  // Throws std::invalid_argument.
  void validate() const;
};

struct SweepRow {
  double beta = 0.0;
  double c = 0.0;
  double alpha = 0.0;
  int dim = 1;
  double lambda_bar = 0.0;
  bool sufficient = false;
  std::optional<double> c_star;
};

// Row-major over the axes (last axis fastest). Throws std::invalid_argument
// for invalid grids or parameter points.
std::vector<SweepRow> run_sweep(const SweepGrid& grid);
std::string sweep_to_csv(const std::vector<SweepRow>& rows);
std::string sweep_to_json(const std::vector<SweepRow>& rows);

}  // namespace mcpsim_cli
