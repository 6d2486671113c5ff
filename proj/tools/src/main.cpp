#include <cstdio>
#include <cstdlib>
#include <string>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "quench/app/config.hpp"
#include "quench/app/scenario.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

constexpr const char* kOutputDirEnv = "QUENCH_OUTPUT_DIR";

}  // namespace

int main(int argc, char** argv) {
  using namespace quench::app;

  CLI::App app{"Touchdown simulations and checks for the radial nonlocal MEMS equation"};
  app.require_subcommand(1);
  std::string config_path;
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Suppress the console summary");

  const std::pair<const char*, Command> commands[] = {
      {"simulate", Command::simulate},
      {"bounds", Command::bounds},
      {"verify", Command::verify},
      {"sweep", Command::sweep},
      {"convergence", Command::convergence},
  };
  const char* help[] = {
      "Run the configured scenario and write trace, snapshots and report",
      "Tabulate the closed-form constants without time stepping",
      "Run the scenario with every check, including a deterministic rerun",
      "Run the (lambda, chi) grid and write sweep.csv",
      "Run the grid refinement study and write convergence.csv",
  };
  for (std::size_t k = 0; k < std::size(commands); ++k) {
    app.add_subcommand(commands[k].first, help[k])->fallthrough()
        ->add_option("config", config_path, "key = value config file")
        ->required();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  Command cmd = Command::simulate;
  for (const auto& [name, c] : commands) {
    if (app.got_subcommand(name)) cmd = c;
  }

  RunConfig cfg;
  try {
    cfg = load_config(config_path);
    if (const char* dir = std::getenv(kOutputDirEnv); dir != nullptr && *dir != '\0') cfg.output_dir = dir;
  } catch (const ConfigError& e) {
    fmt::print(stderr, "config error: {}: {}\n", config_path, e.what());
    return kExitUsage;
  }

  try {
    const ScenarioOutcome outcome = run_scenario(cfg, cmd);
    if (!quiet) fmt::print("{}", emit_summary(cfg, outcome));
    return outcome.all_pass() ? kExitPass : kExitCheckFailed;
  } catch (const ConfigError& e) {
    fmt::print(stderr, "config error: {}: {}\n", config_path, e.what());
    return kExitUsage;
  } catch (const quench::InvalidArgument& e) {
    fmt::print(stderr, "invalid parameters: {}\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    fmt::print(stderr, "run failed: {}\n", e.what());
    return kExitCheckFailed;
  }
}
