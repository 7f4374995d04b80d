#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "tqd/parallel.hpp"
#include "tqd/runner.hpp"

using namespace tqd;
using std::numbers::pi;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("tqd-test-" + name);
  fs::remove_all(dir);
  return dir;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(read_file(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

void check_rejects(const std::string& text, const std::string& fragment) {
  try {
    parse_config(text);
    FAIL("config accepted: " << text);
  } catch (const ConfigError& e) {
    INFO(e.what());
    CHECK(std::string(e.what()).find(fragment) != std::string::npos);
  }
}

}  // namespace

TEST_CASE("minimal echo config gets defaults") {
  const ScenarioConfig cfg = parse_config(R"({"kind": "echo", "theta": 1.0, "omega": 2.0, "omega0": 1.0})");
  CHECK(cfg.kind == ScenarioKind::Echo);
  CHECK(cfg.id == "echo");
  CHECK(cfg.number("omega_pi") == 100.0);
  CHECK(cfg.number("vartheta") == 1.0);
  CHECK(cfg.params["idle_gaps"].size() == 3);
  CHECK_FALSE(cfg.policy.is_fixed());
  CHECK(cfg.policy.target_error() == StepPolicy::kDefaultTargetError);
  CHECK(cfg.tolerances.at("dynamical_cancellation") == 1e-6);
  // The canonical form parses back to the same thing.
  const ScenarioConfig again = parse_config(to_json(cfg).dump());
  CHECK(to_json(again) == to_json(cfg));
}

TEST_CASE("config rejections") {
  check_rejects(R"({"kind": "echo", "theta": 1.0, "omega": 0.0, "omega0": 1.0})", "omega must be nonzero");
  check_rejects(R"({"kind": "echo", "theta": 1.0, "theta": 1.2, "omega": 1.0, "omega0": 1.0})",
                "config.theta: duplicate key");
  check_rejects(R"({"kind": "echo", "theta": 1.0, "omega": 1.0, "omega0": 1.0, "policy": {"tol": 1e-9, "tol": 1e-8}})",
                "config.policy.tol: duplicate key");
  check_rejects(R"({"kind": "echo", "theta": 1.0, "omega": 1.0, "omega0": 1.0, "extra": 1})", "config.extra: unknown key");
  check_rejects(R"({"kind": "echo", "theta": 1.0, "omega": 1.0})", "config.omega0: missing required key");
  check_rejects(R"({"kind": "spin", "theta": 1.0})", "unknown kind");
  check_rejects(R"({"theta": 1.0})", "config.kind");
  check_rejects(R"({"kind": "echo", "theta": "1", "omega": 1.0, "omega0": 1.0})", "config.theta: expected a number");
  check_rejects(R"({"kind": "echo", "theta": 1e999, "omega": 1.0, "omega0": 1.0})", "config");
  check_rejects(R"({"kind": "echo", "theta": 1.0, "omega": 1.0, "omega0": 1.0, "tolerances": {"gate_distance": -1}})",
                "config.tolerances.gate_distance: tolerance must be positive");
  check_rejects(R"({"kind": "echo", "theta": 1.0, "omega": 1.0, "omega0": 1.0, "tolerances": {"leakage": 1}})",
                "config.tolerances.leakage: unknown check");
  check_rejects(R"({"kind": "echo", "theta": 1.0, "omega": 1.0, "omega0": 1.0, "policy": {"tol": 1e-9, "substeps": 8}})",
                "config.policy");
  check_rejects(R"({"kind": "echo", "theta": 1.0, "omega": 1.0, "omega0": 1.0, "idle_gaps": [0, 1]})",
                "config.idle_gaps");
  check_rejects(R"({"kind": "twoqubit", "omegaI": 1.0, "J": 1.0, "omega": 1.0, "pi_II": "x"})", "config.pi_II");
  check_rejects("[1, 2]", "expected a JSON object");
  check_rejects("{", "invalid JSON");
}

TEST_CASE("policy and tolerance overrides") {
  const ScenarioConfig cfg = parse_config(
      R"({"kind": "gate", "vartheta": 0.5, "Omega": 1.0, "policy": {"substeps": 4096},
          "tolerances": {"gate_distance": 1e-3}, "id": "g1", "output_dir": "somewhere"})");
  CHECK(cfg.policy.is_fixed());
  CHECK(cfg.policy.substeps() == 4096);
  CHECK(cfg.tolerances.at("gate_distance") == 1e-3);
  CHECK(cfg.tolerances.at("geometric_phase") == 1e-6);
  CHECK(cfg.id == "g1");
  CHECK(cfg.output_dir == "somewhere");
}

TEST_CASE("format_double keeps 17 significant digits") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(std::stod(format_double(pi)) == pi);
}

TEST_CASE("fields scenario: constant |B| column") {
  ScenarioConfig cfg = parse_config(R"({"kind": "fields", "theta": 1.5707963267948966, "omega": 0.5, "omega0": 1.0, "samples": 32})");
  cfg.output_dir = scratch("fields").string();
  const RunSummary s = run_scenario(cfg);
  CHECK(s.pass());
  const auto rows = read_csv(fs::path(cfg.output_dir) / "fields.csv");
  REQUIRE(rows.size() == 34);
  CHECK(rows[0] == std::vector<std::string>{"t", "segment", "bx", "by", "bz", "norm"});
  for (std::size_t k = 1; k < rows.size(); ++k) CHECK(std::abs(std::stod(rows[k][5]) - std::sqrt(1.25)) < 1e-14);
}

TEST_CASE("echo scenario artifacts are reproducible") {
  const std::string text = R"({"kind": "echo", "theta": 1.0471975511965976, "omega": 1.0, "omega0": 1.0})";
  ScenarioConfig a = parse_config(text);
  ScenarioConfig b = parse_config(text);
  a.output_dir = scratch("echo-a").string();
  b.output_dir = scratch("echo-b").string();
  const RunSummary sa = run_scenario(a);
  run_scenario(b);
  CHECK(sa.pass());
  bool found = false;
  for (const auto& c : sa.checks) {
    if (c.name == "dynamical_cancellation") {
      found = true;
      CHECK(c.measured < 1e-6);
    }
  }
  CHECK(found);
  for (const auto& name : sa.artifacts) {
    CHECK(read_file(fs::path(a.output_dir) / name) == read_file(fs::path(b.output_dir) / name));
  }
  const auto rows = read_csv(fs::path(a.output_dir) / "trajectory.csv");
  CHECK(rows[0] == std::vector<std::string>{"t", "segment", "re0", "im0", "re1", "im1", "fidelity"});
  // Tracking holds on the loops; pulses have no root and report nan.
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const int seg = std::stoi(rows[k][1]);
    if (seg == 0 || seg == 4) CHECK(std::stod(rows[k][6]) > 1.0 - 1e-7);
    if (seg == 2 || seg == 6) CHECK(rows[k][6] == "nan");
  }
  const auto summary = nlohmann::json::parse(read_file(fs::path(a.output_dir) / "summary.json"));
  CHECK(summary["pass"] == true);
  CHECK(summary["scenario"] == "echo");
  CHECK_FALSE(summary["config"].contains("output_dir"));
}

TEST_CASE("evolve scenario with and without correction") {
  ScenarioConfig cfg = parse_config(R"({"kind": "evolve", "theta": 1.0471975511965976, "omega": 1.0, "omega0": 1.0, "label": 1})");
  cfg.output_dir = scratch("evolve").string();
  const RunSummary s = run_scenario(cfg);
  CHECK(s.pass());
  CHECK(s.checks.size() == 3);
  ScenarioConfig root = parse_config(R"({"kind": "evolve", "theta": 1.0471975511965976, "omega": 1.0, "omega0": 1.0, "tqd": false})");
  root.output_dir = scratch("evolve-root").string();
  const RunSummary r = run_scenario(root);
  CHECK(r.checks.empty());
  CHECK(r.info["min_fidelity"].get<double>() == doctest::Approx(0.25).epsilon(1e-6));
  const auto rows = read_csv(fs::path(root.output_dir) / "trajectory.csv");
  double lowest = 1.0;
  for (std::size_t k = 1; k < rows.size(); ++k) lowest = std::min(lowest, std::stod(rows[k][6]));
  CHECK(lowest == doctest::Approx(0.25).epsilon(1e-6));
}

TEST_CASE("gate, twoqubit and expmap scenarios") {
  ScenarioConfig gate = parse_config(R"({"kind": "gate", "vartheta": 1.5707963267948966, "Omega": 1.5707963267948966})");
  gate.output_dir = scratch("gate").string();
  CHECK(run_scenario(gate).pass());

  ScenarioConfig two = parse_config(R"({"kind": "twoqubit", "omegaI": 1.0, "J": 1.0, "omega": 0.5})");
  two.output_dir = scratch("two").string();
  const RunSummary ts = run_scenario(two);
  CHECK(ts.pass());
  CHECK(read_csv(fs::path(two.output_dir) / "trajectory.csv")[0].size() == 11);

  ScenarioConfig literal = parse_config(R"({"kind": "twoqubit", "omegaI": 1.0, "J": 1.0, "omega": 0.5, "pi_II": "second-qubit-only"})");
  literal.output_dir = scratch("two-literal").string();
  const RunSummary ls = run_scenario(literal);
  CHECK_FALSE(ls.pass());
  CHECK_FALSE(ls.checks[0].pass);  // leakage

  ScenarioConfig exp = parse_config(R"({"kind": "expmap", "omegaI": 1.0, "J": 1.0, "omega": 0.2})");
  exp.output_dir = scratch("exp").string();
  CHECK(run_scenario(exp).pass());
}

TEST_CASE("scan scenario ordering and tracking") {
  ScenarioConfig cfg = parse_config(R"({"kind": "scan", "theta": 1.0471975511965976, "ratios": [0.1, 1.0, 10.0], "workers": 3})");
  cfg.output_dir = scratch("scan").string();
  const RunSummary s = run_scenario(cfg);
  CHECK(s.pass());
  const auto rows = read_csv(fs::path(cfg.output_dir) / "scan.csv");
  REQUIRE(rows.size() == 4);
  CHECK(std::stod(rows[1][0]) == 0.1);
  CHECK(std::stod(rows[3][0]) == 10.0);
  for (std::size_t k = 1; k < rows.size(); ++k) CHECK(std::stod(rows[k][2]) >= 1.0 - 1e-7);
  CHECK(std::stod(rows[2][3]) == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(s.info.contains("root_fidelity_trend"));
}

TEST_CASE("parallel map keeps index order and rethrows") {
  const auto out = parallel_map<int>(50, [](std::size_t i) { return static_cast<int>(i * i); }, 4);
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == static_cast<int>(i * i));
  CHECK_THROWS_AS(parallel_map<int>(10, [](std::size_t i) -> int {
                    if (i == 7) throw std::runtime_error("boom");
                    return 0;
                  }, 3),
                  std::runtime_error);
}
