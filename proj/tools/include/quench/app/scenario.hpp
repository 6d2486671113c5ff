#pragma once

// Scenario pipelines behind the command-line tool. Each scenario runs the
// solver, evaluates its checks and writes CSV / JSON outputs atomically.

#include <filesystem>
#include <string>
#include <vector>

#include "quench/app/config.hpp"

namespace quench::app {

enum class Command { simulate, bounds, verify, sweep, convergence };

std::string to_string(Command c);

struct Check {
  std::string name;
  bool applicable = true;
  bool pass = false;
  double margin = 0.0;  // ≥ 0 when the check holds
  double tolerance = 0.0;
  std::string paper_ref;
  std::string detail;
};

struct OutputBundle {
  std::filesystem::path trace_csv;
  std::vector<std::filesystem::path> snapshot_csvs;
  std::filesystem::path report_json;
  std::filesystem::path verification_json;  // verify only
  std::filesystem::path summary_csv;        // sweep and convergence
};

struct ScenarioOutcome {
  Command command = Command::simulate;
  OutputBundle bundle;
  std::vector<Check> checks;
  // Key facts for the console summary, in display order.
  std::vector<std::pair<std::string, std::string>> facts;

  // Every applicable check passes.
  bool all_pass() const;
};

// simulate and verify dispatch on cfg.mode; sweep and convergence run that
// study whatever the mode; bounds evaluates the closed-form constants only.
// verify additionally re-runs the scenario and checks byte-identical output.
// Throws ConfigError when the initial data violates the mode's hypotheses.
ScenarioOutcome run_scenario(const RunConfig& cfg, Command cmd);

// One-screen human summary: parameters, quench bracket, bound, checks.
std::string emit_summary(const RunConfig& cfg, const ScenarioOutcome& outcome);

}  // namespace quench::app
