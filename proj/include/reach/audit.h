#ifndef REACH_AUDIT_H_
#define REACH_AUDIT_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "reach/action_set_io.h"
#include "reach/dataset.h"
#include "reach/models.h"
#include "reach/reachable_db.h"
#include "reach/verify.h"

namespace reach {

struct AuditOptions {
  ReachLimits limits;
  std::size_t workers = 1;
  bool all_points = false;  // audit approved rows too
  bool cache = true;        // per-handle prediction cache
};

struct PointRecord {
  std::size_t row = 0;
  Point x;
  Prediction prediction = 0;
  VerificationResult result;
  std::size_t rset_size = 0;
  bool complete = false;
  std::optional<MethodVerdict> method;
};

struct MethodEval {
  std::size_t evaluated = 0;  // denied rows with an entry in the outputs file
  std::size_t valid_actions = 0;
  std::size_t loopholes = 0;
  std::size_t no_action = 0;
  std::size_t blindspots = 0;
};

struct AuditReport {
  std::string spec_hash;
  std::size_t n_rows = 0;
  std::size_t n_denied = 0;
  std::size_t n_audited = 0;
  // Verdict counts over denied rows.
  std::size_t n_yes = 0;
  std::size_t n_no = 0;
  std::size_t n_abstain = 0;
  std::vector<PointRecord> points;  // audited rows in row order
  std::optional<MethodEval> method_eval;
  // Reachable-set work done by this run (zero when the DB already covered
  // every row).
  std::uint64_t canonical_enumerations = 0;
  std::uint64_t solver_calls = 0;
  std::size_t db_anchors = 0;
  PredictorStats model;
  AuditOptions options;
};

// Predicts every row, extends `db` to all distinct rows, verifies the
// audited rows (denied ones, or all with options.all_points) on
// options.workers threads with one predictor per thread, and grades
// `method` outputs on denied rows when given. Errors name the stage and row.
AuditReport RunAudit(const ActionSet& spec, const Dataset& data,
                     const PredictorFactory& make_model, ReachableDb& db,
                     const AuditOptions& options = {},
                     const MethodOutputs* method = nullptr);

// Report files, each written atomically:
//   per_point.csv   row,x,prediction,verdict,witness,rset_size,complete,
//                   queries,method       (points as space-separated ints)
//   summary.json    aggregates; "generated_at" is the only varying field
//   rset_sizes.csv  row,anchor,size,complete,verdict sorted by size, then row
void WriteReport(const AuditReport& report, const std::filesystem::path& dir);

// summary.json contents; `generated_at` is omitted when empty.
std::string SummaryJson(const AuditReport& report,
                        const std::string& generated_at);

}  // namespace reach

#endif  // REACH_AUDIT_H_
