#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "steeplab");
  std::ostringstream out;
  std::ostringstream err;
  const int code = steeplab::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("steeplab_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string at(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

}  // namespace

TEST_F(Cli, SimulateWritesTrajectoryAndCrossings) {
  const auto r = run({"simulate", "--scenario", "alt-subseq", "--beta", "10000000", "--t-end", "5", "--out", at("run")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(at("run/trajectory.csv")));
  EXPECT_EQ(slurp(at("run/crossings.json")), "[]\n");
  EXPECT_NE(r.out.find("closest closed form: v1"), std::string::npos);
}

TEST_F(Cli, OutputsAreByteIdenticalAcrossRuns) {
  ASSERT_EQ(run({"simulate", "--scenario", "alt-subseq", "--beta", "1001", "--out", at("a")}).code, 0);
  ASSERT_EQ(run({"simulate", "--scenario", "alt-subseq", "--beta", "1001", "--out", at("b")}).code, 0);
  EXPECT_EQ(slurp(at("a/trajectory.csv")), slurp(at("b/trajectory.csv")));
  ASSERT_EQ(run({"sweep", "--scenario", "decay", "--betas", "10,100", "--out", at("a")}).code, 0);
  ASSERT_EQ(run({"sweep", "--scenario", "decay", "--betas", "10,100", "--out", at("b")}).code, 0);
  EXPECT_EQ(slurp(at("a/sweep.json")), slurp(at("b/sweep.json")));
}

TEST_F(Cli, SweepReportsTwoClusters) {
  const auto r = run({"sweep", "--scenario", "alt-subseq", "--betas", "1000000,1000001,10000000,10000001", "--out",
                      at("sw"), "--csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string json = slurp(at("sw/sweep.json"));
  EXPECT_NE(json.find("\"match\": \"v1\""), std::string::npos);
  EXPECT_NE(json.find("\"match\": \"v2\""), std::string::npos);
  EXPECT_NE(json.find("\"entire_sequence_converges\": false"), std::string::npos);
  EXPECT_TRUE(fs::exists(at("sw/trajectory_beta10000001.csv")));
}

TEST_F(Cli, CheckPrintsQ) {
  const auto r = run({"check", "--firing", "pwl", "--eps", "0.01", "--delta", "0.1"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "Q=10\n");
  const auto b = run({"check", "--scenario", "threshold-advanced", "--betas", "10,100,1000"});
  EXPECT_EQ(b.code, 0);
  EXPECT_NE(b.out.find("B=1"), std::string::npos);
}

TEST_F(Cli, LimitSolveThenAnalyzeReingests) {
  auto r = run({"limit-solve", "--scenario", "multi-solution", "--s-infty-zero", "1.0", "--out", at("ls")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("closest closed form: v1 (sup distance "), std::string::npos);
  r = run({"analyze", "--trajectory", at("ls/trajectory.csv"), "--scenario", "multi-solution", "--out", at("an")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("extra-threshold-simple"), std::string::npos);
  EXPECT_TRUE(fs::exists(at("an/diagnostics.json")));
  EXPECT_TRUE(fs::exists(at("an/residual.csv")));
  EXPECT_TRUE(fs::exists(at("an/r_curve.csv")));

  ASSERT_EQ(run({"simulate", "--scenario", "decay", "--beta", "10", "--out", at("sim")}).code, 0);
  r = run({"analyze", "--trajectory", at("sim/trajectory.csv"), "--scenario", "decay", "--beta", "10", "--out",
           at("an2")});
  EXPECT_EQ(r.code, 0) << r.err;
}

TEST_F(Cli, ScenarioShowRoundTripsThroughFile) {
  auto r = run({"scenario", "list"});
  EXPECT_EQ(r.out, "alt-subseq\ndecay\nmulti-solution\nthreshold-advanced\n");
  ASSERT_EQ(run({"scenario", "show", "alt-subseq", "--out", at("alt.json")}).code, 0);
  r = run({"simulate", "--scenario", at("alt.json"), "--beta", "1000", "--out", at("f")});
  ASSERT_EQ(r.code, 0) << r.err;
  ASSERT_EQ(run({"simulate", "--scenario", "alt-subseq", "--beta", "1000", "--out", at("n")}).code, 0);
  EXPECT_EQ(slurp(at("f/trajectory.csv")), slurp(at("n/trajectory.csv")));
  r = run({"scenario", "show", "alt-subseq"});
  EXPECT_EQ(r.out, slurp(at("alt.json")));
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({"simulate", "--scenario", "decay", "--bogus"}).code, 1);
  EXPECT_EQ(run({"simulate", "--scenario", "nowhere.json"}).code, 1);
  EXPECT_EQ(run({"simulate", "--scenario", "decay", "--beta", "inf"}).code, 1);
  EXPECT_EQ(run({"simulate", "--scenario", "decay", "--rel-tol", "0.5"}).code, 1);
  EXPECT_EQ(run({"limit-solve", "--scenario", "multi-solution", "--mode", "solve", "--max-crossings", "0", "--out",
                 at("x")}).code,
            0);
  EXPECT_EQ(run({"scenario", "show", "nope"}).code, 1);
  EXPECT_EQ(run({"--help"}).code, 0);

  // A numerical failure: a very stiff unit cannot be stepped.
  std::string text = run({"scenario", "show", "decay"}).out;
  const auto pos = text.find("\"tau\": [\n    1.0");
  ASSERT_NE(pos, std::string::npos);
  text.replace(text.find("1.0", pos), 3, "1e-16");
  std::ofstream(at("stiff.json")) << text;
  const auto r = run({"simulate", "--scenario", at("stiff.json"), "--out", at("stiff")});
  EXPECT_EQ(r.code, 2) << r.err;
  EXPECT_NE(r.err.find("stiffness/step underflow"), std::string::npos);
}
