#include "pgnc/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include <unistd.h>

#include <fmt/format.h>
#include <gtest/gtest.h>

#include "pgnc/artifacts.hpp"
#include "pgnc/error.hpp"

namespace pgnc {
namespace {

namespace fs = std::filesystem;

const fs::path kScenarios = fs::path(PGNC_SOURCE_DIR) / "scenarios";

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() /
           fmt::format("pgnc_cli_{}_{}", info->name(), static_cast<long>(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int Run(std::vector<std::string> args) {
    args.insert(args.begin(), "pgnc");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    out_.str("");
    err_.str("");
    return run_cli(static_cast<int>(argv.size()), argv.data(), out_, err_);
  }

  fs::path Write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    write_text_file(p, text);
    return p;
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

TEST_F(CliTest, AnalyzeDefaultScenario) {
  ASSERT_EQ(Run({"analyze", "--scenario", (kScenarios / "default_analysis.yaml").string()}), 0)
      << err_.str();
  const std::string report = out_.str();
  EXPECT_EQ(report.rfind("# planar-gnc ", 0), 0u);
  EXPECT_NE(report.find("controllability_rank: 6"), std::string::npos);
  EXPECT_NE(report.find("failed: \"{T1}\"  rank: 6"), std::string::npos);
  EXPECT_NE(report.find("failed: \"{T1,T2}\"  rank: 4"), std::string::npos);
  EXPECT_NE(report.find("pure_fy: true"), std::string::npos);
}

TEST_F(CliTest, AnalyzeHConfigurationFlagsLateralForce) {
  ASSERT_EQ(Run({"analyze", "--scenario", (kScenarios / "h_config.yaml").string(), "--out",
                 dir_.string()}),
            0);
  const std::string report = read_text_file(dir_ / "analysis.txt");
  EXPECT_NE(report.find("config: H"), std::string::npos);
  EXPECT_NE(report.find("pure_fy: false"), std::string::npos);
}

TEST_F(CliTest, MissingFileAndParseErrorHaveDistinctCodes) {
  const int missing = Run({"analyze", "--scenario", (dir_ / "nope.yaml").string()});
  EXPECT_EQ(missing, static_cast<int>(ExitCode::kIo));
  const fs::path bad = Write("bad.yaml", "name: x\nvehicle:\n  mass: 2.0\n  colour: red\n");
  const int parse = Run({"analyze", "--scenario", bad.string()});
  EXPECT_EQ(parse, static_cast<int>(ExitCode::kParse));
  EXPECT_NE(err_.str().find("vehicle.colour"), std::string::npos) << err_.str();
  EXPECT_NE(err_.str().find(":4"), std::string::npos) << err_.str();
  EXPECT_NE(missing, parse);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(Run({}), static_cast<int>(ExitCode::kUsage));
  EXPECT_EQ(Run({"fly"}), static_cast<int>(ExitCode::kUsage));
  EXPECT_EQ(Run({"modulate", "--freq", "0", "--out", (dir_ / "m.csv").string()}),
            static_cast<int>(ExitCode::kUsage));
}

TEST_F(CliTest, DesignArtifactRoundTripsAndIsDeterministic) {
  const std::string scenario = (kScenarios / "sinusoid_both.yaml").string();
  ASSERT_EQ(Run({"design", "--scenario", scenario, "--out", (dir_ / "a.yaml").string()}), 0)
      << err_.str();
  ASSERT_EQ(Run({"design", "--scenario", scenario, "--out", (dir_ / "b.yaml").string()}), 0);
  const std::string a = read_text_file(dir_ / "a.yaml");
  EXPECT_EQ(a, read_text_file(dir_ / "b.yaml"));

  const GainArtifact parsed = load_gains(dir_ / "a.yaml");
  const GainArtifact direct = design_artifact(load_scenario(scenario));
  ASSERT_EQ(parsed.designs.size(), 2u);
  for (const DesignResult& d : direct.designs) {
    const DesignResult* p = parsed.find(d.controller);
    ASSERT_NE(p, nullptr);
    EXPECT_EQ(p->gains.K, d.gains.K);
    EXPECT_EQ(p->gains.feedforward, d.gains.feedforward);
    EXPECT_EQ(p->gains.sample_time, d.gains.sample_time);
  }
  EXPECT_EQ(serialize_gains(parsed), a);
}

TEST_F(CliTest, DesignMatchesGoldenTabletopPreset) {
  const fs::path out = dir_ / "gains.yaml";
  ASSERT_EQ(Run({"design", "--scenario", (kScenarios / "tabletop_step.yaml").string(), "--out",
                 out.string()}),
            0);
  const GainArtifact golden =
      load_gains(fs::path(PGNC_SOURCE_DIR) / "tests" / "golden" / "tabletop_step_gains.yaml");
  const GainArtifact fresh = load_gains(out);
  ASSERT_EQ(golden.designs.size(), fresh.designs.size());
  const Eigen::MatrixXd& Kg = golden.designs[0].gains.K;
  const Eigen::MatrixXd& Kf = fresh.designs[0].gains.K;
  ASSERT_EQ(Kg.rows(), Kf.rows());
  ASSERT_EQ(Kg.cols(), Kf.cols());
  EXPECT_LT((Kg - Kf).cwiseAbs().maxCoeff(), 1e-9 * Kg.cwiseAbs().maxCoeff());
}

TEST_F(CliTest, SingularQuadPartitionReportsSynthesisFailure) {
  // Two thrusters left: the pose cannot be held with zero steady thrust.
  const fs::path s = Write("s.yaml",
                           "name: contrived\npreset: tabletop\n"
                           "vehicle:\n  failed_thrusters: [T1, T2]\n"
                           "controller:\n  type: pi_nzsp\n");
  EXPECT_EQ(Run({"design", "--scenario", s.string(), "--out", (dir_ / "g.yaml").string()}),
            static_cast<int>(ExitCode::kSynthesis));
  EXPECT_FALSE(err_.str().empty());
}

TEST_F(CliTest, SimulateWritesBothControllers) {
  const std::string scenario = (kScenarios / "sinusoid_both.yaml").string();
  ASSERT_EQ(Run({"simulate", "--scenario", scenario, "--out", dir_.string()}), 0) << err_.str();
  for (const char* c : {"sdr", "pi_nzsp"}) {
    const std::string csv = read_text_file(dir_ / fmt::format("trajectory_{}.csv", c));
    EXPECT_EQ(csv.rfind("# planar-gnc ", 0), 0u);
    EXPECT_NE(csv.find("t,x,y,psi,u,v,r,T1,T2,T3,T4,T1a,T2a,T3a,T4a"), std::string::npos);
    const std::string metrics = read_text_file(dir_ / fmt::format("metrics_{}.txt", c));
    EXPECT_EQ(metrics.rfind("# planar-gnc ", 0), 0u);
  }
}

TEST_F(CliTest, SimulateRejectsMismatchedGains) {
  const fs::path gains = dir_ / "g.yaml";
  ASSERT_EQ(Run({"design", "--scenario", (kScenarios / "tabletop_step.yaml").string(), "--out",
                 gains.string()}),
            0);
  const fs::path s = Write("s.yaml",
                           "name: nolag\npreset: tabletop\nactuator:\n  lag_tau: null\n"
                           "simulation:\n  duration: 1.0\n");
  const int code = Run({"simulate", "--scenario", s.string(), "--gains", gains.string(),
                        "--out", (dir_ / "o").string()});
  EXPECT_NE(code, 0);
  EXPECT_NE(err_.str().find("dimension"), std::string::npos) << err_.str();
}

TEST_F(CliTest, OptimizeConstrainedStaysInBounds) {
  ASSERT_EQ(Run({"optimize", "--scenario", (kScenarios / "tpbvp_constrained.yaml").string(),
                 "--out", dir_.string()}),
            0)
      << err_.str();
  const std::string summary = read_text_file(dir_ / "summary.txt");
  EXPECT_NE(summary.find("mode: constrained"), std::string::npos);
  EXPECT_NE(summary.find("negative_thrust: false"), std::string::npos);
  std::istringstream csv(read_text_file(dir_ / "solution.csv"));
  std::string line;
  std::getline(csv, line);
  std::getline(csv, line);
  int rows = 0;
  while (std::getline(csv, line)) {
    std::vector<double> v;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
    ASSERT_EQ(v.size(), 17u);
    for (int j = 13; j < 17; ++j) {
      EXPECT_GE(v[j], 0.0);
      EXPECT_LE(v[j], 0.025);
    }
    ++rows;
  }
  EXPECT_GE(rows, 101);
}

TEST_F(CliTest, OptimizeUnconstrainedFlagsNegativeThrust) {
  ASSERT_EQ(Run({"optimize", "--scenario", (kScenarios / "tpbvp_unconstrained.yaml").string(),
                 "--out", dir_.string()}),
            0);
  EXPECT_NE(read_text_file(dir_ / "summary.txt").find("negative_thrust: true"),
            std::string::npos);
}

TEST_F(CliTest, OptimizeTrivialMoveHasNearZeroCost) {
  const fs::path s = Write("s.yaml",
                           "name: still\ntpbvp:\n  xf: [0, 0, 0, 0, 0, 0]\n"
                           "  constrained: false\n");
  ASSERT_EQ(Run({"optimize", "--scenario", s.string(), "--out", dir_.string()}), 0);
  const std::string summary = read_text_file(dir_ / "summary.txt");
  const auto pos = summary.find("cost_N2s: ");
  ASSERT_NE(pos, std::string::npos);
  EXPECT_LT(std::abs(std::stod(summary.substr(pos + 10))), 1e-15);
}

TEST_F(CliTest, OptimizeWithoutBlockIsParseError) {
  EXPECT_EQ(Run({"optimize", "--scenario", (kScenarios / "h_config.yaml").string(), "--out",
                 dir_.string()}),
            static_cast<int>(ExitCode::kParse));
}

TEST_F(CliTest, ModulateRowCountsAndDegenerateWarning) {
  const fs::path a = dir_ / "a.csv";
  ASSERT_EQ(Run({"modulate", "--freq", "10", "--step", "0.01", "--out", a.string()}), 0);
  std::istringstream in(read_text_file(a));
  std::string line;
  int data_rows = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#' && line.rfind("duty", 0) != 0) ++data_rows;
  }
  EXPECT_EQ(data_rows, 101);

  const fs::path b = dir_ / "b.csv";
  ASSERT_EQ(Run({"modulate", "--freq", "100", "--out", b.string()}), 0);
  EXPECT_NE(read_text_file(b).find("warning: degenerate"), std::string::npos);
}

TEST_F(CliTest, BatchDirectoryWithJobs) {
  const fs::path scen = dir_ / "scen";
  write_text_file(scen / "one.yaml", "name: one\n");
  write_text_file(scen / "two.yaml", "name: two\nvehicle:\n  config: H\n");
  ASSERT_EQ(Run({"analyze", "--scenario", scen.string(), "--out", (dir_ / "out").string(),
                 "--jobs", "2"}),
            0)
      << err_.str();
  EXPECT_TRUE(fs::exists(dir_ / "out" / "one" / "analysis.txt"));
  EXPECT_TRUE(fs::exists(dir_ / "out" / "two" / "analysis.txt"));
}

TEST_F(CliTest, ProcessRunsAreByteIdentical) {
  const std::string cli = PGNC_CLI_PATH;
  const std::string scenario = (kScenarios / "tabletop_yaw_step.yaml").string();
  for (const char* run : {"r1", "r2"}) {
    const std::string cmd = fmt::format("\"{}\" simulate --scenario \"{}\" --out \"{}\"", cli,
                                        scenario, (dir_ / run).string());
    ASSERT_EQ(std::system(cmd.c_str()), 0);
  }
  EXPECT_EQ(read_text_file(dir_ / "r1" / "trajectory_sdr.csv"),
            read_text_file(dir_ / "r2" / "trajectory_sdr.csv"));
  EXPECT_EQ(read_text_file(dir_ / "r1" / "metrics_sdr.txt"),
            read_text_file(dir_ / "r2" / "metrics_sdr.txt"));
}

}  // namespace
}  // namespace pgnc
