// reach: reachable sets and recourse audits from the command line.
//
//   reach audit --spec S --data D (--model-linear F | --model-cmd CMD) ...
//   reach reachable --spec S --point 0,1
//   reach check --spec S --point 0,1 --action 1,0
//
// Exit status: 0 success, 1 bad usage or unreadable/invalid input, 2 failure
// while running (predictor fault, spec/database mismatch, I/O).

#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "reach/action_set_io.h"
#include "reach/audit.h"

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kRuntime = 2;

struct LimitFlags {
  std::size_t max_points = 1'000'000;
  double max_time = 60.0;
  bool no_decompose = false;

  void Add(CLI::App* cmd) {
    cmd->add_option("--max-points", max_points,
                    "cap on points per reachable set")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--max-time", max_time,
                    "seconds allowed per reachable set")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--no-decompose", no_decompose,
                  "enumerate all features jointly");
  }

  reach::ReachLimits Limits() const {
    reach::ReachLimits limits;
    limits.max_points = max_points;
    limits.max_seconds = max_time;
    limits.decompose = !no_decompose;
    return limits;
  }
};

int Fail(int code, const std::exception& e) {
  std::cerr << "reach: " << e.what() << "\n";
  return code;
}

struct AuditFlags {
  std::string spec, data, model_linear, model_cmd, rdb, save_rdb, method;
  std::string out = "audit_out";
  std::size_t workers = 1;
  bool all_points = false;
  bool no_cache = false;
  LimitFlags limits;
};

int RunAuditCommand(const AuditFlags& f) {
  using namespace reach;
  std::optional<ActionSet> spec;
  std::optional<Dataset> data;
  std::optional<MethodOutputs> method;
  PredictorFactory factory;
  try {
    spec = LoadActionSet(f.spec);
    data = LoadDataset(*spec, f.data);
    if (!f.model_linear.empty()) {
      auto model = std::make_shared<LinearModel>(
          LoadLinearModel(f.model_linear, spec->dimension()));
      factory = [model] { return std::make_unique<LinearModel>(*model); };
    } else {
      const std::string cmd = f.model_cmd;
      const std::size_t d = spec->dimension();
      factory = [cmd, d] { return std::make_unique<ExternalPredictor>(cmd, d); };
    }
    if (!f.method.empty()) {
      method = LoadMethodOutputs(*spec, f.method, data->rows.size());
    }
  } catch (const Error& e) {
    return Fail(kUsage, e);
  }

  try {
    const bool have_db = !f.rdb.empty() && std::filesystem::exists(f.rdb);
    ReachableDb db = have_db ? ReachableDb::Load(*spec, f.rdb) : ReachableDb(*spec);

    AuditOptions options;
    options.limits = f.limits.Limits();
    options.workers = f.workers;
    options.all_points = f.all_points;
    options.cache = !f.no_cache;
    AuditReport report = RunAudit(*spec, *data, factory, db, options,
                                  method ? &*method : nullptr);

    if (!f.rdb.empty() && (!have_db || report.canonical_enumerations > 0)) {
      db.Save(f.rdb);
    }
    if (!f.save_rdb.empty()) db.Save(f.save_rdb);
    WriteReport(report, f.out);

    std::cout << "rows " << report.n_rows << ", denied " << report.n_denied
              << ": recourse " << report.n_yes << ", no recourse "
              << report.n_no << ", abstain " << report.n_abstain << "\n";
    if (report.method_eval) {
      const auto& m = *report.method_eval;
      std::cout << "method outputs " << m.evaluated << ": loopholes "
                << m.loopholes << ", blindspots " << m.blindspots << "\n";
    }
    std::cout << "solver calls " << report.solver_calls
              << ", reachable sets " << report.db_anchors << ", report in "
              << f.out << "\n";
  } catch (const std::exception& e) {
    return Fail(kRuntime, e);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reachable sets and recourse verification"};
  app.require_subcommand(1);

  AuditFlags audit;
  auto* audit_cmd = app.add_subcommand("audit", "audit a model on a dataset");
  audit_cmd->add_option("--spec", audit.spec, "action set file")->required();
  audit_cmd->add_option("--data", audit.data, "dataset CSV")->required();
  auto* linear = audit_cmd->add_option("--model-linear", audit.model_linear,
                                       "linear model file");
  auto* cmd = audit_cmd->add_option("--model-cmd", audit.model_cmd,
                                    "predictor command (line protocol)");
  linear->excludes(cmd);
  cmd->excludes(linear);
  audit_cmd->add_option("--rdb", audit.rdb,
                        "reachable database to reuse (created if missing)");
  audit_cmd->add_option("--save-rdb", audit.save_rdb,
                        "also write the reachable database here");
  audit_cmd->add_option("--method-outputs", audit.method,
                        "third-party actions per row");
  audit_cmd->add_option("--workers", audit.workers)->check(CLI::PositiveNumber);
  audit_cmd->add_option("--out", audit.out, "report directory");
  audit_cmd->add_flag("--all-points", audit.all_points,
                      "audit approved rows too");
  audit_cmd->add_flag("--no-cache", audit.no_cache,
                      "query the model for every point");
  audit.limits.Add(audit_cmd);

  std::string spec_path, point_text, action_text;
  LimitFlags reach_limits;
  auto* reachable_cmd =
      app.add_subcommand("reachable", "print the reachable set of a point");
  reachable_cmd->add_option("--spec", spec_path)->required();
  reachable_cmd->add_option("--point", point_text, "comma-separated")->required();
  reach_limits.Add(reachable_cmd);

  auto* check_cmd = app.add_subcommand("check", "test one action at a point");
  check_cmd->add_option("--spec", spec_path)->required();
  check_cmd->add_option("--point", point_text)->required();
  check_cmd->add_option("--action", action_text)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  if (*audit_cmd) {
    if (audit.model_linear.empty() == audit.model_cmd.empty()) {
      std::cerr << "reach: give exactly one of --model-linear, --model-cmd\n";
      return kUsage;
    }
    return RunAuditCommand(audit);
  }

  std::optional<reach::ActionSet> spec;
  reach::Point x;
  reach::Action a;
  try {
    spec = reach::LoadActionSet(spec_path);
    x = reach::ParsePoint(point_text);
    if (*check_cmd) a = reach::ParsePoint(action_text);
    spec->RequireInDomain(x);
  } catch (const reach::Error& e) {
    return Fail(kUsage, e);
  }

  try {
    if (*check_cmd) {
      std::cout << (spec->CheckAction(x, a) ? "admissible" : "not admissible")
                << "\n";
      return kOk;
    }
    auto rset = reach::GetReachableSet(*spec, x, reach_limits.Limits());
    std::cout << "# " << rset.size() << " points, complete="
              << (rset.complete() ? 1 : 0) << ", solves=" << rset.stats().solves
              << "\n";
    rset.ForEach([](const reach::Point& p) {
      std::cout << reach::FormatPoint(p) << "\n";
      return true;
    });
  } catch (const std::exception& e) {
    return Fail(kRuntime, e);
  }
  return kOk;
}
