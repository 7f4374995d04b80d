#pragma once

// Batch scenarios: strict JSON config in, CSV and JSON artifacts out.
//
// CSV floats use 17 significant digits. Trajectory columns:
//   t, segment, re0, im0, re1, im1[, re2, im2, re3, im3], fidelity
// where fidelity is the weight on the root eigenspace that the segment
// started in, and nan on segments whose root Hamiltonian vanishes.

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "tqd/fields.hpp"
#include "tqd/propagator.hpp"

namespace tqd {

enum class ScenarioKind { Fields, Evolve, Echo, Gate, TwoQubit, ExpMap, Scan };

std::string to_string(ScenarioKind kind);
ScenarioKind scenario_kind_from_string(const std::string& name);  // throws ConfigError

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::Fields;
  std::string id;
  nlohmann::json params;  // every parameter of the kind, defaults filled in
  std::string output_dir = "tqd-out";
  StepPolicy policy = StepPolicy::target();
  std::map<std::string, double> tolerances;  // every check of the kind

  double number(const std::string& key) const { return params.at(key).get<double>(); }
};

// Rejects duplicate keys, unknown keys, missing required keys, wrong types and
// non-finite numbers; messages name the offending path (e.g. "config.theta").
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::filesystem::path& path);

// Canonical form of a parsed config (round-trips through parse_config).
nlohmann::json to_json(const ScenarioConfig& cfg);

struct Check {
  std::string name;
  double measured = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct RunSummary {
  std::string id;
  ScenarioKind kind = ScenarioKind::Fields;
  std::vector<Check> checks;
  std::vector<std::string> artifacts;  // file names relative to output_dir
  nlohmann::json info = nlohmann::json::object();

  bool pass() const;
};

nlohmann::json to_json(const RunSummary& s);

// Runs the scenario and writes its artifacts plus summary.json into
// cfg.output_dir. Numerical failures propagate as exceptions.
RunSummary run_scenario(const ScenarioConfig& cfg);

std::string format_double(double v);  // %.17g, "nan" for NaN

}  // namespace tqd
