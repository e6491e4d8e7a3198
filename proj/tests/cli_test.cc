#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>

#include "reach/common.h"

namespace reach {
namespace {

namespace fs = std::filesystem;

const std::string kCli = REACH_CLI;
const std::string kData = REACH_DATA_DIR;
const std::string kFig1 = kData + "/examples/fig1";
const std::string kFig1Spec = kData + "/action_sets/fig1.actions";

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("reach_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  // Exit status of `reach args`; stdout lands in out_.
  int Run(const std::string& args) {
    const std::string cmd = "'" + kCli + "' " + args + " >'" +
                            (dir_ / "stdout").string() + "' 2>'" +
                            (dir_ / "stderr").string() + "'";
    const int status = std::system(cmd.c_str());
    out_ = ReadFile(dir_ / "stdout");
    err_ = ReadFile(dir_ / "stderr");
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string Write(const std::string& name, const std::string& text) {
    std::ofstream(dir_ / name) << text;
    return (dir_ / name).string();
  }

  std::string Fig1Audit(const std::string& extra) {
    return "audit --spec " + kFig1Spec + " --data " + kFig1 +
           "/data.csv --model-linear " + kFig1 + "/model.linear --out " +
           (dir_ / "out").string() + " " + extra;
  }

  fs::path dir_;
  std::string out_, err_;
};

TEST_F(CliTest, Usage) {
  EXPECT_EQ(Run(""), 1);
  EXPECT_EQ(Run("frobnicate"), 1);
  EXPECT_EQ(Run("audit --spec " + kFig1Spec), 1);
  EXPECT_EQ(Run("audit --spec " + kFig1Spec + " --data " + kFig1 + "/data.csv"), 1);
  EXPECT_EQ(Run(Fig1Audit("--model-cmd cat")), 1);
  EXPECT_EQ(Run(Fig1Audit("--workers 0")), 1);
  EXPECT_EQ(Run(Fig1Audit("--max-points 0")), 1);
  EXPECT_EQ(Run("--help"), 0);
}

TEST_F(CliTest, AuditFig1) {
  ASSERT_EQ(Run(Fig1Audit("--method-outputs " + kFig1 + "/method_outputs.csv")), 0)
      << err_;
  EXPECT_NE(out_.find("denied 1: recourse 0, no recourse 1"), std::string::npos)
      << out_;
  EXPECT_NE(out_.find("loopholes 1"), std::string::npos) << out_;
  for (const char* f : {"per_point.csv", "summary.json", "rset_sizes.csv"}) {
    EXPECT_TRUE(fs::exists(dir_ / "out" / f)) << f;
  }
}

TEST_F(CliTest, AuditWithExternalModel) {
  ASSERT_EQ(Run("audit --spec " + kFig1Spec + " --data " + kFig1 +
                "/data.csv --model-cmd '" ECHO_PREDICTOR "' --workers 2 --out " +
                (dir_ / "out").string()),
            0)
      << err_;
  // Parity of x1 + 2*x2 denies (0,0) and (0,1); both reach (1,0) or (1,1).
  EXPECT_NE(out_.find("denied 2: recourse 2"), std::string::npos) << out_;
  EXPECT_EQ(Run("audit --spec " + kFig1Spec + " --data " + kFig1 +
                "/data.csv --model-cmd '" ECHO_PREDICTOR " --garbage' --out " +
                (dir_ / "out").string()),
            2);
  EXPECT_NE(err_.find("row"), std::string::npos) << err_;
}

TEST_F(CliTest, BadInputsExitOne) {
  EXPECT_EQ(Run(Fig1Audit("").replace(Fig1Audit("").find(kFig1 + "/data.csv"),
                                      (kFig1 + "/data.csv").size(),
                                      (dir_ / "missing.csv").string())),
            1);
  const std::string bad = Write("bad.csv", "x1,x2\n0,0\n1,2\n");
  EXPECT_EQ(Run("audit --spec " + kFig1Spec + " --data " + bad +
                " --model-linear " + kFig1 + "/model.linear"),
            1);
  EXPECT_NE(err_.find("row 1, column x2"), std::string::npos) << err_;
  const std::string short_model = Write("m.linear", "b=0\nw=1\n");
  EXPECT_EQ(Run("audit --spec " + kFig1Spec + " --data " + kFig1 +
                "/data.csv --model-linear " + short_model),
            1);
  const std::string bad_spec = Write("bad.actions", "[features]\nx,binary,0,2,yes,+\n");
  EXPECT_EQ(Run("reachable --spec " + bad_spec + " --point 0"), 1);
  EXPECT_EQ(Run("reachable --spec " + kFig1Spec + " --point 0,2"), 1);
}

TEST_F(CliTest, ReusesDatabase) {
  const std::string spec = Write(
      "t.actions",
      "[features]\nt1,binary,0,1,yes,+\nt2,binary,0,1,yes,+\nv,integer,0,3,yes,\n"
      "[constraints]\nthermometer(features=[t1, t2], direction=increase)\n");
  const std::string data = Write("t.csv", "t1,t2,v\n0,0,0\n1,0,1\n1,1,2\n");
  const std::string model = Write("t.linear", "b=-3\nw=0,0,1\n");
  const std::string rdb = (dir_ / "sets.rdb").string();
  const std::string args = "audit --spec " + spec + " --data " + data +
                           " --model-linear " + model + " --rdb " + rdb +
                           " --out " + (dir_ / "out").string();
  ASSERT_EQ(Run(args), 0) << err_;
  EXPECT_EQ(out_.find("solver calls 0,"), std::string::npos) << out_;
  ASSERT_TRUE(fs::exists(rdb));
  const std::string saved = ReadFile(rdb);
  ASSERT_EQ(Run(args), 0) << err_;
  EXPECT_NE(out_.find("solver calls 0,"), std::string::npos) << out_;
  EXPECT_EQ(ReadFile(rdb), saved);

  // A database built for another action set is refused.
  const std::string other = (dir_ / "other.rdb").string();
  ASSERT_EQ(Run(Fig1Audit("--save-rdb " + other)), 0) << err_;
  EXPECT_EQ(Run("audit --spec " + spec + " --data " + data + " --model-linear " +
                model + " --rdb " + other),
            2);
}

TEST_F(CliTest, ReachableAndCheck) {
  ASSERT_EQ(Run("reachable --spec " + kFig1Spec + " --point 0,0"), 0) << err_;
  EXPECT_EQ(out_, "# 4 points, complete=1, solves=0\n0,0\n1,0\n0,1\n1,1\n");
  ASSERT_EQ(Run("reachable --spec " + kFig1Spec + " --point 0,0 --max-points 2"), 0);
  EXPECT_EQ(out_, "# 2 points, complete=0, solves=0\n0,0\n1,0\n");
  ASSERT_EQ(Run("check --spec " + kFig1Spec + " --point 1,1 --action -1,0"), 0);
  EXPECT_EQ(out_, "not admissible\n");
  ASSERT_EQ(Run("check --spec " + kFig1Spec + " --point 0,1 --action 1,0"), 0);
  EXPECT_EQ(out_, "admissible\n");
}

}  // namespace
}  // namespace reach
