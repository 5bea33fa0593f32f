#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fracsym/io.hpp"

namespace fracsym::cli {

/// Flat `key = value` configuration with command-line overrides.
struct ExperimentConfig {
  std::string experiment;
  std::string out_dir;
  std::map<std::string, std::string> kv;

  bool has(const std::string& key) const { return kv.count(key) > 0; }
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::string get_string(const std::string& key,
                         const std::string& fallback) const;
};

extern const std::vector<std::string> kExperimentNames;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parses `fracsym <experiment> [--config FILE] [--key value ...] --out DIR`.
ExperimentConfig parse_args(int argc, const char* const* argv);

/// Parses a flat key = value file (# comments, blank lines allowed).
std::map<std::string, std::string> parse_config_file(const std::string& path);

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct RunResult {
  Json summary;
  std::vector<CheckResult> checks;
  int exit_code = 0;  // 0 pass, 2 theorem-check failure
};

/// Dispatches to the experiment, writes outputs and manifest.json into
/// config.out_dir, returns the process exit code (0 pass, 1 error,
/// 2 theorem-check failure).
int run(const ExperimentConfig& config);

std::string usage();
std::string version_string();

/// Writes a gnuplot script overlaying the snapshot CSVs found in run_dir
/// (plus cumulative-mass curves); errors when no snapshots are present.
void emit_plot_script(const std::string& run_dir);

}  // namespace fracsym::cli
