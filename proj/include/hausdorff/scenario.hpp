#pragma once

#include "hausdorff/bounds.hpp"
#include "hausdorff/serialize.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace hausdorff {

/// Malformed or inconsistent scenario configuration.
class ConfigError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// One experiment, read from a JSON file:
///
///   {"scenario": "sphere-slice", "seed": 42, "backend": {"kind": "sphere", "n": 3},
///    "kernel": {...}, "atoms": {...}, "q": [2, "inf"], "samples": {"mc": 20000},
///    "parameters": {...}, "checks": [...], "output": "out/sphere"}
///
/// Only "scenario" and "seed" are mandatory. Missing sample counts, q values
/// and parameters take per-scenario defaults; a missing check list means every
/// check of the scenario.
struct ScenarioConfig {
  std::string scenario;
  std::uint64_t seed = 0;
  Json backend;
  Json kernel;
  Json atoms;
  std::vector<double> q;
  std::map<std::string, std::size_t> samples;
  Json parameters = Json::object();
  std::vector<std::string> checks;
  std::string output;

  bool operator==(const ScenarioConfig& other) const = default;
};

/// Validates field types, scenario name, sample counts (>= 1) and check names.
ScenarioConfig parse_config(const Json& j);
Json to_json(const ScenarioConfig& config);
ScenarioConfig load_config(const std::string& path);

const std::vector<std::string>& scenario_names();
/// Sample-count keys a scenario understands, with their defaults.
std::map<std::string, std::size_t> default_samples(const std::string& scenario);
/// The sample count replaced by the --samples override.
std::string primary_sample_key(const std::string& scenario);
/// Every check the scenario runs for this config, in report order.
std::vector<std::string> available_checks(const ScenarioConfig& config);

/// Kernel recipes: "discrete" (explicit terms), "random_discrete" (random
/// automorphisms of the backend), "delsarte", "slice" (Phi constant or an
/// indicator mixture on O(n-1)) and "remark2".
KernelSpec kernel_from_json(const Json& j, const Space& space, std::uint64_t seed);

struct Check {
  std::string name;
  bool pass = false;
  /// Measured discrepancy and what it was allowed to be.
  double residual = 0.0;
  double tolerance = 0.0;
  Json detail = Json::object();
};

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Json>> rows;
};

struct RunReport {
  ScenarioConfig config;
  std::vector<Check> checks;
  std::vector<Json> bounds;
  std::vector<Table> tables;
  double seconds = 0.0;

  bool pass() const;
  std::vector<std::string> failures() const;
};

/// Runs the configured checks; each requested check appears exactly once.
RunReport run_scenario(const ScenarioConfig& config);

/// Infinite values are written as the strings "inf" / "-inf".
Json number_to_json(double x);
Json to_json(const BoundReport& report);
Json to_json(const RunReport& report);
std::string to_csv(const Table& table);

/// Writes report.json and <table>.csv files into the directory (created if
/// needed) and returns the paths written.
std::vector<std::string> emit_report(const RunReport& report, const std::string& directory);

}  // namespace hausdorff
