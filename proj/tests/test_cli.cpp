#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "quench/app/config.hpp"
#include "quench/app/scenario.hpp"
#include "quench/io.hpp"

using namespace quench;
using namespace quench::app;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("quench_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "run.cfg";
  std::ofstream(p) << text;
  return p;
}

int run_cli(const std::string& args, const fs::path& out) {
  const std::string cmd = "QUENCH_OUTPUT_DIR='" + out.string() + "' '" QUENCH_CLI "' " + args + " -q > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch("exit");
  const fs::path bad = write_config(dir, "mode=lemma7\nn=1\nR=1\nlambda=200\nlambda=100\nchi=0.1\n");
  EXPECT_EQ(run_cli("simulate '" + bad.string() + "'", dir / "out"), 2);
  EXPECT_EQ(run_cli("simulate '" + (dir / "missing.cfg").string() + "'", dir / "out"), 2);
  EXPECT_EQ(run_cli("frobnicate x", dir / "out"), 2);
  EXPECT_EQ(run_cli("", dir / "out"), 2);

  const fs::path ok = write_config(dir, "mode=theorem8\nn=1\nR=1\nlambda=50\nchi=0.1\ninitial=parabolic\nM=101\n");
  EXPECT_EQ(run_cli("simulate '" + ok.string() + "'", dir / "out"), 0);
  EXPECT_TRUE(fs::exists(dir / "out" / "trace.csv"));
  EXPECT_TRUE(fs::exists(dir / "out" / "report.json"));

  // λ too small to quench: the quench check fails.
  const fs::path fail = write_config(dir, "mode=theorem8\nn=1\nR=1\nlambda=0.5\nchi=0.1\ninitial=parabolic\nM=65\nt_max=0.5\n");
  EXPECT_EQ(run_cli("simulate '" + fail.string() + "'", dir / "out2"), 1);
  fs::remove_all(dir);
}

TEST(Cli, VerifyReportShape) {
  const fs::path dir = scratch("verify");
  const fs::path cfg = write_config(dir, "mode=comparison\nn=1\nR=1\nlambda=10\nchi=0\nM=65\nt_max=0.2\n");
  ASSERT_EQ(run_cli("verify '" + cfg.string() + "'", dir / "out"), 0);
  const auto report = nlohmann::json::parse(io::read_file(dir / "out" / "verification.json"));
  ASSERT_TRUE(report.contains("checks"));
  bool saw_rerun = false;
  for (const auto& c : report["checks"]) {
    for (const char* k : {"name", "applicable", "pass", "margin", "tolerance", "paper_ref"}) EXPECT_TRUE(c.contains(k)) << k;
    saw_rerun |= c["name"] == "deterministic_rerun";
  }
  EXPECT_TRUE(saw_rerun);
  fs::remove_all(dir);
}

TEST(Scenario, TraceAndSnapshotFormats) {
  const fs::path dir = scratch("formats");
  RunConfig cfg = parse_config("mode=lemma7\nn=1\nR=1\nlambda=200\nchi=0.1\nM=65\n");
  cfg.output_dir = dir;
  const ScenarioOutcome out = run_scenario(cfg, Command::simulate);
  const std::string trace = io::read_file(out.bundle.trace_csv);
  EXPECT_EQ(trace.substr(0, trace.find('\n')), "step,t,dt,sup_u,gap,A,I,boundary_flux,A_running_min");
  ASSERT_FALSE(out.bundle.snapshot_csvs.empty());
  for (const auto& s : out.bundle.snapshot_csvs) EXPECT_EQ(io::read_file(s).substr(0, 4), "r,u\n");
  const auto report = nlohmann::json::parse(io::read_file(out.bundle.report_json));
  EXPECT_TRUE(report.contains("config"));
  const std::string summary = emit_summary(cfg, out);
  EXPECT_NE(summary.find("T ∈ ["), std::string::npos) << summary;
  fs::remove_all(dir);
}

TEST(Scenario, RerunIsByteIdentical) {
  const fs::path a = scratch("rerun_a"), b = scratch("rerun_b");
  RunConfig cfg = parse_config("mode=theorem8\nn=3\nR=1\nlambda=30\nchi=0.1\ninitial=parabolic\nM=65\n");
  cfg.output_dir = a;
  const ScenarioOutcome oa = run_scenario(cfg, Command::simulate);
  cfg.output_dir = b;
  run_scenario(cfg, Command::simulate);
  EXPECT_EQ(io::read_file(a / "trace.csv"), io::read_file(b / "trace.csv"));
  for (const auto& s : oa.bundle.snapshot_csvs)
    EXPECT_EQ(io::read_file(s), io::read_file(b / s.filename()));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Scenario, NoQuenchSummary) {
  const fs::path dir = scratch("steady");
  RunConfig cfg = parse_config("mode=lemma7\nn=1\nR=1\nlambda=0.1\nchi=1\nM=33\nt_max=50\nsteady_tol=1e-8\n");
  cfg.output_dir = dir;
  const ScenarioOutcome out = run_scenario(cfg, Command::simulate);
  EXPECT_NE(emit_summary(cfg, out).find("no quench up to t ="), std::string::npos);
  fs::remove_all(dir);
}

TEST(Scenario, SmallSweepIsOrderIndependent) {
  const fs::path d1 = scratch("sweep1"), d4 = scratch("sweep4");
  const std::string text =
      "mode=sweep\nn=1\nR=1\nM=33\nt_max=20\nsteady_tol=1e-7\n"
      "lambda_min=0.5\nlambda_max=40\nlambda_count=4\nchi_min=0\nchi_max=1\nchi_count=3\n";
  RunConfig one = parse_config(text);
  one.output_dir = d1;
  RunConfig four = parse_config(text + "workers=4\n");
  four.output_dir = d4;
  const ScenarioOutcome o1 = run_scenario(one, Command::sweep);
  run_scenario(four, Command::sweep);
  EXPECT_TRUE(o1.all_pass());
  const std::string table = io::read_file(o1.bundle.summary_csv);
  EXPECT_EQ(table, io::read_file(d4 / o1.bundle.summary_csv.filename()));
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 13);
  const std::string summary = emit_summary(one, o1);
  EXPECT_NE(summary.find("quenched"), std::string::npos) << summary;
  fs::remove_all(d1);
  fs::remove_all(d4);
}

TEST(Scenario, BoundsTable) {
  const fs::path dir = scratch("bounds");
  RunConfig cfg = parse_config("mode=theorem9\nn=1\nR=1\nlambda=30\nchi=0.1\ninitial=parabolic\n");
  cfg.output_dir = dir;
  const ScenarioOutcome out = run_scenario(cfg, Command::bounds);
  const auto b = nlohmann::json::parse(io::read_file(dir / "bounds.json"));
  EXPECT_FALSE(b.empty());
  fs::remove_all(dir);
}

TEST(Scenario, InadmissibleInitialDataIsConfigError) {
  RunConfig cfg = parse_config("mode=theorem9\nn=1\nR=1\nlambda=30\nchi=0.1\ninitial=zero\n");
  cfg.output_dir = scratch("inadmissible");
  EXPECT_THROW(run_scenario(cfg, Command::simulate), ConfigError);
}
