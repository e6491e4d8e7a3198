#include <gtest/gtest.h>

#include <filesystem>
#include <nlohmann/json.hpp>

#include "reach/action_set_io.h"
#include "reach/audit.h"
#include "test_util.h"

namespace reach {
namespace {

namespace fs = std::filesystem;
using testing::Fig1Spec;

const std::string kData = REACH_DATA_DIR;

std::string Message(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

PredictorFactory Linear(std::vector<std::string> w, std::string b) {
  return [w, b] { return std::make_unique<LinearModel>(w, b); };
}

fs::path TempDir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() /
                 ("reach_audit_test_" + name + std::to_string(::getpid()));
  fs::remove_all(dir);
  return dir;
}

TEST(DatasetTest, ParsesRowsAndLabels) {
  ActionSet spec = Fig1Spec();
  Dataset d = ParseDataset(spec, "y,x1,x2\n1,0,1\n0,1,1\n");
  EXPECT_EQ(d.rows, (std::vector<Point>{{0, 1}, {1, 1}}));
  ASSERT_TRUE(d.labels);
  EXPECT_EQ(*d.labels, (std::vector<int>{1, 0}));
  Dataset plain = ParseDataset(spec, "x1,x2\n0,0\n");
  EXPECT_FALSE(plain.labels);
  EXPECT_EQ(ParseDataset(spec, SerializeDataset(d)).rows, d.rows);
  EXPECT_EQ(*ParseDataset(spec, SerializeDataset(d)).labels, *d.labels);
}

TEST(DatasetTest, Errors) {
  ActionSet spec = Fig1Spec();
  std::string msg = Message([&] { ParseDataset(spec, "x1,x2\n0,0\n1,2\n"); });
  EXPECT_NE(msg.find("row 1"), std::string::npos) << msg;
  EXPECT_NE(msg.find("column x2"), std::string::npos) << msg;
  EXPECT_THROW(ParseDataset(spec, "x1,x2\n0,0\n1,2\n"), ValidationError);
  EXPECT_THROW(ParseDataset(spec, "x2,x1\n0,0\n"), ValidationError);
  EXPECT_THROW(ParseDataset(spec, "x1\n0\n"), ValidationError);
  EXPECT_THROW(ParseDataset(spec, "x1,x2\n0\n"), ParseError);
  EXPECT_THROW(ParseDataset(spec, "x1,x2\n0,a\n"), ParseError);
  EXPECT_THROW(ParseDataset(spec, "x1,x2,y\n0,0,2\n"), ParseError);
  EXPECT_THROW(ParseDataset(spec, ""), ParseError);

  ActionSet thermo({{"t1", ValueType::kBinary, 0, 1, true, Sign::kNonNegative},
                    {"t2", ValueType::kBinary, 0, 1, true, Sign::kNonNegative}},
                   {ThermometerEncoding{{0, 1}}});
  msg = Message([&] { ParseDataset(thermo, "t1,t2\n1,0\n0,1\n"); });
  EXPECT_NE(msg.find("row 1"), std::string::npos) << msg;
}

TEST(MethodOutputsTest, Parse) {
  ActionSet spec = Fig1Spec();
  auto m = ParseMethodOutputs(spec, "row_index,a_1,a_2\n3,-1,0\n0,,\n2\n", 4);
  ASSERT_EQ(m.entries.size(), 3u);
  EXPECT_EQ(m.entries.at(3), (Action{-1, 0}));
  EXPECT_FALSE(m.entries.at(0));
  EXPECT_FALSE(m.entries.at(2));
  EXPECT_THROW(ParseMethodOutputs(spec, "4,0,0\n", 4), ValidationError);
  EXPECT_THROW(ParseMethodOutputs(spec, "1,0,0\n1,0,0\n", 4), ParseError);
  EXPECT_THROW(ParseMethodOutputs(spec, "1,0\n", 4), ParseError);
  EXPECT_THROW(ParseMethodOutputs(spec, "x,0,0\n", 4), ParseError);
  EXPECT_THROW(ParseMethodOutputs(spec, "1,0,z\n", 4), ParseError);
}

struct Fig1Audit {
  ActionSet spec = LoadActionSet(kData + "/action_sets/fig1.actions");
  Dataset data = LoadDataset(spec, kData + "/examples/fig1/data.csv");
  MethodOutputs method = LoadMethodOutputs(
      spec, kData + "/examples/fig1/method_outputs.csv", data.rows.size());
  LinearModel model =
      LoadLinearModel(kData + "/examples/fig1/model.linear", spec.dimension());
};

TEST(AuditTest, Fig1) {
  Fig1Audit f;
  ReachableDb db(f.spec);
  auto model = f.model;
  AuditReport r = RunAudit(
      f.spec, f.data, [&] { return std::make_unique<LinearModel>(model); }, db,
      {}, &f.method);
  EXPECT_EQ(r.n_rows, 4u);
  EXPECT_EQ(r.n_denied, 1u);
  EXPECT_EQ(r.n_audited, 1u);
  EXPECT_EQ(r.n_no, 1u);
  EXPECT_EQ(r.n_yes + r.n_abstain, 0u);
  ASSERT_EQ(r.points.size(), 1u);
  EXPECT_EQ(r.points[0].row, 3u);
  EXPECT_EQ(r.points[0].rset_size, 1u);
  EXPECT_TRUE(r.points[0].complete);
  EXPECT_EQ(r.points[0].method, MethodVerdict::kLoophole);
  ASSERT_TRUE(r.method_eval);
  EXPECT_EQ(r.method_eval->evaluated, 1u);
  EXPECT_EQ(r.method_eval->loopholes, 1u);
  EXPECT_EQ(r.db_anchors, 4u);

  AuditOptions all;
  all.all_points = true;
  AuditReport everyone = RunAudit(
      f.spec, f.data, [&] { return std::make_unique<LinearModel>(model); }, db,
      all);
  EXPECT_EQ(everyone.n_audited, 4u);
  EXPECT_EQ(everyone.n_denied, 1u);
  EXPECT_EQ(everyone.points[0].result.verdict, Verdict::kYes);
}

TEST(AuditTest, NothingDenied) {
  Fig1Audit f;
  ReachableDb db(f.spec);
  AuditReport r = RunAudit(f.spec, f.data, Linear({"0", "0"}, "0"), db, {},
                           &f.method);
  EXPECT_EQ(r.n_denied, 0u);
  EXPECT_EQ(r.n_audited, 0u);
  auto j = nlohmann::json::parse(SummaryJson(r, ""));
  EXPECT_TRUE(j["pct_recourse"].is_null());
  EXPECT_TRUE(j["pct_no_recourse"].is_null());
  EXPECT_TRUE(j["pct_abstain"].is_null());
  EXPECT_EQ(j["method_eval"]["n_evaluated"], 0);
  EXPECT_TRUE(j["method_eval"]["pct_loopholes"].is_null());
  EXPECT_FALSE(j.contains("generated_at"));
}

TEST(AuditTest, ErrorsNameTheRow) {
  Fig1Audit f;
  ReachableDb db(f.spec);
  PredictorFactory crash = [] {
    return std::make_unique<ExternalPredictor>(
        std::string(ECHO_PREDICTOR) + " --garbage", 2);
  };
  std::string msg = Message([&] { RunAudit(f.spec, f.data, crash, db); });
  EXPECT_NE(msg.find("prediction, row 0"), std::string::npos) << msg;
  EXPECT_THROW(RunAudit(f.spec, f.data, crash, db), ModelError);
  EXPECT_THROW(RunAudit(f.spec, f.data, Linear({"1"}, "0"), db), DomainError);
}

// Thermometer t1..t3 plus a free counter.
ActionSet ThermoSpec() {
  std::vector<FeatureSpec> fs;
  for (const char* n : {"t1", "t2", "t3"}) {
    fs.push_back({n, ValueType::kBinary, 0, 1, true, Sign::kNonNegative});
  }
  fs.push_back({"v", ValueType::kInteger, 0, 3, true, Sign::kFree});
  return ActionSet(fs, {ThermometerEncoding{{0, 1, 2}}});
}

TEST(AuditTest, SecondModelReusesReachableSets) {
  ActionSet spec = ThermoSpec();
  Dataset data;
  data.rows = {{0, 0, 0, 0}, {1, 0, 0, 1}, {1, 1, 0, 2}, {1, 0, 0, 1},
               {1, 1, 1, 3}, {0, 0, 0, 3}};
  ReachableDb db(spec);
  AuditReport first =
      RunAudit(spec, data, Linear({"0", "0", "1", "0"}, "-1"), db);
  EXPECT_GT(first.solver_calls, 0u);
  EXPECT_EQ(first.db_anchors, 5u);
  AuditReport second =
      RunAudit(spec, data, Linear({"0", "0", "0", "1"}, "-3"), db);
  EXPECT_EQ(second.solver_calls, 0u);
  EXPECT_EQ(second.canonical_enumerations, 0u);
  EXPECT_EQ(second.n_denied, 4u);
  EXPECT_EQ(second.n_yes, 4u);

  // Same through a saved database.
  ReachableDb loaded = ReachableDb::Parse(spec, db.Serialize());
  AuditReport third =
      RunAudit(spec, data, Linear({"0", "0", "0", "1"}, "-3"), loaded);
  EXPECT_EQ(third.solver_calls, 0u);
  EXPECT_EQ(SummaryJson(third, "t"), SummaryJson(second, "t"));
}

TEST(AuditTest, ReportFiles) {
  Fig1Audit f;
  ReachableDb db(f.spec);
  AuditOptions opts;
  opts.all_points = true;
  AuditReport r = RunAudit(
      f.spec, f.data, [&] { return std::make_unique<LinearModel>(f.model); },
      db, opts, &f.method);
  fs::path dir = TempDir("files");
  WriteReport(r, dir);
  EXPECT_EQ(ReadFile(dir / "per_point.csv"),
            "row,x,prediction,verdict,witness,rset_size,complete,queries,method\n"
            "0,0 0,1,yes,0 0,4,1,1,\n"
            "1,0 1,1,yes,0 1,2,1,1,\n"
            "2,1 0,1,yes,1 0,2,1,1,\n"
            "3,1 1,0,no,,1,1,1,loophole\n");
  EXPECT_EQ(ReadFile(dir / "rset_sizes.csv"),
            "row,anchor,size,complete,verdict\n"
            "3,1 1,1,1,no\n"
            "1,0 1,2,1,yes\n"
            "2,1 0,2,1,yes\n"
            "0,0 0,4,1,yes\n");
  auto j = nlohmann::json::parse(ReadFile(dir / "summary.json"));
  EXPECT_EQ(j["n_denied"], 1);
  EXPECT_EQ(j["counts"]["no_recourse"], 1);
  EXPECT_DOUBLE_EQ(j["pct_no_recourse"].get<double>(), 100.0);
  EXPECT_EQ(j["method_eval"]["loopholes"], 1);
  EXPECT_TRUE(j["generated_at"].is_string());
  fs::remove_all(dir);
}

TEST(AuditTest, DeterministicAcrossRunsAndWorkers) {
  std::mt19937_64 rng(11);
  ActionSet spec = ThermoSpec();
  Dataset data;
  const std::vector<Point> states{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {1, 1, 1}};
  for (int i = 0; i < 60; ++i) {
    Point x = states[rng() % 4];
    x.push_back(static_cast<Value>(rng() % 4));
    data.rows.push_back(x);
  }
  PredictorFactory echo = [] {
    return std::make_unique<ExternalPredictor>(ECHO_PREDICTOR, 4);
  };
  std::vector<std::string> outputs;
  for (std::size_t workers : {1, 1, 3}) {
    ReachableDb db(spec);
    AuditOptions opts;
    opts.workers = workers;
    AuditReport r = RunAudit(spec, data, echo, db, opts);
    fs::path dir = TempDir("det" + std::to_string(outputs.size()));
    WriteReport(r, dir);
    auto j = nlohmann::json::parse(ReadFile(dir / "summary.json"));
    j.erase("generated_at");
    j["model"].erase("backend_batches");
    j["model"].erase("backend_points");
    j["options"].erase("workers");
    outputs.push_back(ReadFile(dir / "per_point.csv") +
                      ReadFile(dir / "rset_sizes.csv") + j.dump());
    fs::remove_all(dir);
  }
  EXPECT_EQ(outputs[0], outputs[1]);
  EXPECT_EQ(outputs[0], outputs[2]);
}

}  // namespace
}  // namespace reach
