// tqd-echo: run one scenario from a JSON config, or the acceptance suite.
//
//   tqd-echo <fields|evolve|echo|gate|twoqubit|expmap|scan> --config <path>
//            [--out <dir>] [--substeps N | --tol X]
//   tqd-echo verify-all
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 bad config or usage,
// 3 numerical failure (no convergence, lost tracking).

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tqd/acceptance.hpp"
#include "tqd/phase_analysis.hpp"
#include "tqd/runner.hpp"

namespace {

struct ScenarioArgs {
  std::string config;
  std::optional<std::string> out;
  std::optional<long> substeps;
  std::optional<double> tol;
};

int run(const std::string& subcommand, const ScenarioArgs& args) {
  tqd::ScenarioConfig cfg;
  try {
    cfg = tqd::load_config(args.config);
    if (tqd::to_string(cfg.kind) != subcommand) {
      throw tqd::ConfigError("config.kind: '" + tqd::to_string(cfg.kind) +
                             "' does not match subcommand '" + subcommand + "'");
    }
    if (args.out) cfg.output_dir = *args.out;
    if (args.substeps) cfg.policy = tqd::StepPolicy::fixed(*args.substeps);
    if (args.tol) cfg.policy = tqd::StepPolicy::target(*args.tol);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  tqd::RunSummary summary;
  try {
    summary = tqd::run_scenario(cfg);
  } catch (const tqd::ConvergenceError& e) {
    std::cerr << "numerical failure (convergence): " << e.what() << '\n';
    return 3;
  } catch (const tqd::TrackingError& e) {
    std::cerr << "numerical failure (tracking): " << e.what() << '\n';
    return 3;
  }
  for (const auto& c : summary.checks) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": measured "
              << tqd::format_double(c.measured) << ", target " << tqd::format_double(c.target)
              << ", tolerance " << tqd::format_double(c.tolerance) << '\n';
  }
  std::cout << "artifacts in " << cfg.output_dir << '\n';
  return summary.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transitionless spin-echo simulator"};
  app.require_subcommand(1);

  ScenarioArgs args;
  std::string chosen;
  for (const char* name : {"fields", "evolve", "echo", "gate", "twoqubit", "expmap", "scan"}) {
    CLI::App* sub = app.add_subcommand(name, std::string("run a '") + name + "' scenario");
    sub->add_option("--config", args.config, "scenario config (strict JSON)")->required();
    sub->add_option("--out", args.out, "output directory (overrides config)");
    auto* substeps = sub->add_option("--substeps", args.substeps, "fixed substeps per segment");
    auto* tol = sub->add_option("--tol", args.tol, "target error for adaptive stepping");
    substeps->excludes(tol);
    sub->callback([&chosen, name] { chosen = name; });
  }
  app.add_subcommand("verify-all", "run the acceptance suite")->callback([&chosen] {
    chosen = "verify-all";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (chosen == "verify-all") {
    bool ok = true;
    for (const auto& r : tqd::run_acceptance(std::cout)) ok = ok && r.pass;
    return ok ? 0 : 1;
  }
  return run(chosen, args);
}
