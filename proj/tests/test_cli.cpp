#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli_app.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "swarmctl");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = swarmctl::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("swarmctl_test_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  std::vector<std::string> small(std::vector<std::string> extra) const {
    std::vector<std::string> a = {"-o", dir.string(), "-j", "1", "-s", "N=8", "-s", "K=3", "-s", "T=0.5",
                                  "-s", "leaders.count=2", "-s", "init.box=5", "-s", "mc.M=3"};
    a.insert(a.end(), extra.begin(), extra.end());
    return a;
  }

  fs::path dir;
};

}  // namespace

TEST_F(CliTest, ValidateDefaults) {
  const auto r = cli({"validate"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("valid"), std::string::npos);
}

TEST_F(CliTest, InvalidConfigExitsTwoWithReport) {
  const auto r = cli({"-s", "dt=0", "validate"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("dt must be positive"), std::string::npos);
  EXPECT_EQ(cli({"-s", "nonsense=1", "validate"}).code, 2);
  EXPECT_EQ(cli({"-c", (dir / "missing.cfg").string(), "validate"}).code, 2);
  EXPECT_EQ(cli({"frobnicate"}).code, 2);
}

TEST_F(CliTest, ConfigFileThenOverrides) {
  std::ofstream(dir / "a.cfg") << "N = 12\nT = 3\n";
  const auto r = cli({"-c", (dir / "a.cfg").string(), "-s", "T=2", "validate", "--print"});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("N = 12\n"), std::string::npos);
  EXPECT_NE(r.out.find("T = 2\n"), std::string::npos);
}

TEST_F(CliTest, RunPrintsJsonAndDumpsTrajectory) {
  const auto dump = dir / "traj.csv";
  const auto r = cli(small({"run", "--dump", dump.string()}));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.front(), '{');
  EXPECT_NE(r.out.find("\"tube_all\""), std::string::npos);
  // header + (ceil(T/dt) + 1) rows per agent
  EXPECT_EQ(count_lines(slurp(dump)), 1u + (50u + 1u) * 8u);
}

TEST_F(CliTest, McWritesOneLinePerRun) {
  const auto r = cli(small({"-s", "mc.M=1", "mc"}));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(count_lines(slurp(dir / "records.jsonl")), 1u);
  const std::string csv = slurp(dir / "summary.csv");
  EXPECT_EQ(csv.rfind("# config_hash=", 0), 0u);
  EXPECT_NE(csv.find("p_tube"), std::string::npos);
  EXPECT_NE(r.out.find("P(tube)"), std::string::npos);
}

TEST_F(CliTest, McIsByteStable) {
  ASSERT_EQ(cli(small({"mc"})).code, 0);
  const auto a = slurp(dir / "records.jsonl");
  const auto b = slurp(dir / "summary.csv");
  auto parallel = small({"mc"});
  parallel[3] = "2";
  ASSERT_EQ(cli(parallel).code, 0);
  EXPECT_EQ(slurp(dir / "records.jsonl"), a);
  EXPECT_EQ(slurp(dir / "summary.csv"), b);
}

TEST_F(CliTest, CompareInfiniteThreshold) {
  const auto r = cli(small({"-s", "leaders.theta=1e9", "compare"}));
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = slurp(dir / "compare.csv");
  EXPECT_NE(csv.find("mean_l1_cost,"), std::string::npos);
  EXPECT_NE(csv.find("mean_duty,1.0000,0.0000"), std::string::npos);
  std::istringstream lines(slurp(dir / "sparse.jsonl"));
  std::string line;
  while (std::getline(lines, line)) EXPECT_NE(line.find("\"l1_cost\":0,"), std::string::npos) << line;
}

TEST_F(CliTest, CompareZeroThresholdMatchesBaseline) {
  ASSERT_EQ(cli(small({"-s", "leaders.theta=0", "compare"})).code, 0);
  EXPECT_EQ(slurp(dir / "baseline.jsonl"), slurp(dir / "sparse.jsonl"));
}

TEST_F(CliTest, SweepRowsPerValue) {
  auto r = cli(small({"-s", "mc.M=1", "-s", "dt=0.1", "sweep", "--axis", "T", "--values", "5,6,7,8,9,10"}));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(count_lines(slurp(dir / "sweep.csv")), 2u + 6u);
  r = cli(small({"-s", "mc.M=1", "-s", "N=13", "sweep", "--axis", "leaders", "--values", "4,6,8,10,12"}));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(count_lines(slurp(dir / "sweep.csv")), 2u + 5u);
  EXPECT_EQ(cli(small({"sweep", "--axis", "gain"})).code, 2);
  EXPECT_EQ(cli(small({"sweep", "--axis", "leaders", "--values", "50"})).code, 2);
}

TEST_F(CliTest, DiagnosePassesAndNegativeControlFails) {
  auto r = cli(small({"diagnose", "--trials", "50"}));
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("PASS cancellation"), std::string::npos);
  EXPECT_NE(r.out.find("PASS coercivity"), std::string::npos);
  EXPECT_NE(r.out.find("PASS alignment_contraction"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "drift_scatter.csv"));
  r = cli(small({"diagnose", "--trials", "50", "--flip-repulsion-sign"}));
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.out.find("FAIL coercivity"), std::string::npos);
}

TEST_F(CliTest, AllRunsFailingIsRuntimeFailure) {
  const auto r = cli(small({"-s", "N=40", "-s", "init.box=0.5", "-s", "init.min_sep=0.4", "mc"}));
  EXPECT_EQ(r.code, 3);
}
