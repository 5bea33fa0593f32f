#include "fracsym/cli.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>

#ifndef FRACSYM_VERSION
#define FRACSYM_VERSION "0.1.0+unknown"
#endif

namespace fracsym::cli {

const std::vector<std::string> kExperimentNames = {
    "rearrange",          "apply-op",
    "solve-elliptic",     "elliptic-symmetrize",
    "elliptic-counterexample", "evolve",
    "parabolic-symmetrize",    "fpme-counterexample",
    "barenblatt",         "oracle-check"};

std::string version_string() { return std::string("fracsym ") + FRACSYM_VERSION; }

double ExperimentConfig::get_double(const std::string& key,
                                    double fallback) const {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  try {
    std::size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing junk");
    return v;
  } catch (const std::exception&) {
    throw UsageError("invalid numeric value for --" + key + ": " + it->second);
  }
}

int ExperimentConfig::get_int(const std::string& key, int fallback) const {
  auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  try {
    std::size_t pos = 0;
    const int v = std::stoi(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing junk");
    return v;
  } catch (const std::exception&) {
    throw UsageError("invalid integer value for --" + key + ": " + it->second);
  }
}

std::string ExperimentConfig::get_string(const std::string& key,
                                         const std::string& fallback) const {
  auto it = kv.find(key);
  return it == kv.end() ? fallback : it->second;
}

std::string usage() {
  std::ostringstream os;
  os << "usage: fracsym <experiment> [--config FILE] [--key value ...] --out DIR\n"
     << "experiments:\n";
  for (const std::string& n : kExperimentNames) os << "  " << n << "\n";
  os << "exit codes: 0 pass, 1 error, 2 theorem-check failed\n";
  return os.str();
}

namespace {
std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}
}  // namespace

std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw UsageError("config line " + std::to_string(lineno) +
                       " is not `key = value`: " + t);
    const std::string key = trim(t.substr(0, eq));
    const std::string val = trim(t.substr(eq + 1));
    if (key.empty()) throw UsageError("empty key in config line " +
                                      std::to_string(lineno));
    kv[key] = val;
  }
  return kv;
}

ExperimentConfig parse_args(int argc, const char* const* argv) {
  if (argc < 2) throw UsageError("missing experiment name\n" + usage());
  ExperimentConfig cfg;
  cfg.experiment = argv[1];
  if (std::find(kExperimentNames.begin(), kExperimentNames.end(),
                cfg.experiment) == kExperimentNames.end())
    throw UsageError("unknown experiment: " + cfg.experiment + "\n" + usage());

  std::map<std::string, std::string> overrides;
  std::optional<std::string> config_path;
  for (int i = 2; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg.rfind("--", 0) != 0)
      throw UsageError("expected --key, got: " + arg);
    const std::string key = arg.substr(2);
    if (i + 1 >= argc) throw UsageError("missing value for --" + key);
    const std::string val = argv[++i];
    if (key == "config")
      config_path = val;
    else if (key == "out")
      cfg.out_dir = val;
    else
      overrides[key] = val;
  }
  if (config_path) cfg.kv = parse_config_file(*config_path);
  for (const auto& [k, v] : overrides) cfg.kv[k] = v;
  if (cfg.out_dir.empty())
    throw UsageError("missing required --out DIR\n" + usage());
  return cfg;
}

// defined in experiments.cpp
RunResult dispatch_experiment(const ExperimentConfig& config);

int run(const ExperimentConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  RunResult result = dispatch_experiment(config);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  Json manifest;
  manifest["experiment"] = config.experiment;
  manifest["version"] = version_string();
  Json echo;
  for (const auto& [k, v] : config.kv) echo[k] = v;
  manifest["config"] = echo;
  manifest["out"] = config.out_dir;
  manifest["wall_clock_seconds"] = wall;
  manifest["summary"] = result.summary;
  Json checks = Json::array();
  bool all_pass = true;
  for (const CheckResult& c : result.checks) {
    Json jc;
    jc["name"] = c.name;
    jc["pass"] = c.pass;
    jc["detail"] = c.detail;
    checks.push_back(jc);
    all_pass = all_pass && c.pass;
  }
  manifest["checks"] = checks;
  const int code = result.exit_code != 0 ? result.exit_code : (all_pass ? 0 : 2);
  manifest["exit_code"] = code;
  write_json_file(config.out_dir + "/manifest.json", manifest);
  return code;
}

}  // namespace fracsym::cli
