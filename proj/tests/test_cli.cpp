#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "dcfguard/scenario.hpp"

namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("dcfguard_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

int cli(const std::string& args) {
  const std::string cmd = std::string(DCFGUARD_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const std::string kScenarios = DCFGUARD_SOURCE_DIR "/scenarios/";

}  // namespace

TEST(Cli, ExampleScenariosParse) {
  int n = 0;
  for (const auto& e : fs::directory_iterator(kScenarios)) {
    if (e.path().extension() != ".yaml") continue;
    EXPECT_NO_THROW(dcfguard::parse_scenario(slurp(e.path()))) << e.path();
    ++n;
  }
  EXPECT_GT(n, 0);
}

TEST(Cli, RunWritesTraceAndSummary) {
  const fs::path d = fresh_dir("run");
  EXPECT_EQ(cli("run " + kScenarios + "two_station_w16.yaml --out-dir " + d.string()), 0);
  const std::string trace = slurp(d / "two-station-w16.trace.csv");
  EXPECT_EQ(trace.rfind("time_s,window,station_id,", 0), 0u);
  EXPECT_EQ(slurp(d / "two-station-w16.summary.csv").rfind("run,station_id,", 0), 0u);
}

TEST(Cli, FlagsChangeTheRun) {
  const fs::path a = fresh_dir("flags_a");
  const fs::path b = fresh_dir("flags_b");
  const std::string file = kScenarios + "two_station_w16.yaml";
  ASSERT_EQ(cli("run " + file + " --out-dir " + a.string() + " --no-policing --measurement-mode oracle"), 0);
  ASSERT_EQ(cli("run " + file + " --out-dir " + b.string() + " --seed 2"), 0);
  const std::string off = slurp(a / "two-station-w16.trace.csv");
  EXPECT_NE(off, slurp(b / "two-station-w16.trace.csv"));
  // no policing: penalty (column 9) stays 0
  std::istringstream lines(off);
  std::string line;
  std::getline(lines, line);
  int rows = 0;
  while (std::getline(lines, line)) {
    std::istringstream cells(line);
    std::string cell;
    for (int i = 0; i <= 9; ++i) std::getline(cells, cell, ',');
    EXPECT_EQ(std::stod(cell), 0.0) << line;
    ++rows;
  }
  EXPECT_GT(rows, 0);
}

TEST(Cli, EnvironmentSetsDefaultOutDir) {
  const fs::path d = fresh_dir("env");
  const std::string cmd = "DCFGUARD_OUT_DIR=" + d.string() + " " + DCFGUARD_CLI + " analytics fig6 >/dev/null";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_TRUE(fs::exists(d / "fig6.csv"));
}

TEST(Cli, PresetRunsAreDeterministic) {
  const fs::path a = fresh_dir("det_a");
  const fs::path b = fresh_dir("det_b");
  ASSERT_EQ(cli("preset fig1 --seed 4 --out-dir " + a.string()), 0);
  ASSERT_EQ(cli("preset fig1 --seed 4 --out-dir " + b.string()), 0);
  EXPECT_EQ(slurp(a / "fig1-policing.trace.csv"), slurp(b / "fig1-policing.trace.csv"));
  EXPECT_EQ(slurp(a / "fig1.summary.csv"), slurp(b / "fig1.summary.csv"));
}

TEST(Cli, SweepWritesRowsAndAggregates) {
  const fs::path d = fresh_dir("sweep");
  ASSERT_EQ(cli("sweep " + kScenarios + "two_station_w16.yaml --axis controller.alpha --values 0.1,0.2 --seeds 1..2 "
                "--workers 2 --out-dir " + d.string()),
            0);
  const std::string agg = slurp(d / "two-station-w16-controller.alpha.summary.csv");
  EXPECT_EQ(agg.rfind("controller.alpha,policy,seeds,", 0), 0u);
  EXPECT_NE(agg.find("0.2,cwmin-halved,2,"), std::string::npos) << agg;
}

TEST(Cli, ExitCodes) {
  const fs::path d = fresh_dir("codes");
  EXPECT_EQ(cli("preset nonexistent --out-dir " + d.string()), 2);
  EXPECT_EQ(cli("run /no/such/file.yaml --out-dir " + d.string()), 2);
  std::ofstream(d / "bad.yaml") << "duration_s: 10\nstations:\n  - id: 1\n  - id: 1\n";
  EXPECT_EQ(cli("run " + (d / "bad.yaml").string() + " --out-dir " + d.string()), 2);
  EXPECT_EQ(cli("sweep " + kScenarios + "two_station_w16.yaml --axis bogus --values 1 --out-dir " + d.string()), 2);
  EXPECT_EQ(cli("run"), 1);
  EXPECT_EQ(cli("analytics fig99"), 1);
  EXPECT_EQ(cli("run " + kScenarios + "capture.yaml --measurement-mode exact"), 1);
}
