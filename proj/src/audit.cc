#include "reach/audit.h"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <exception>
#include <nlohmann/json.hpp>
#include <thread>
#include <unordered_map>

namespace reach {
namespace {

[[noreturn]] void Rethrow(std::exception_ptr error, const std::string& where) {
  try {
    std::rethrow_exception(error);
  } catch (const ValidationError& e) {
    throw ValidationError(where + e.what());
  } catch (const DomainError& e) {
    throw DomainError(where + e.what());
  } catch (const ModelError& e) {
    throw ModelError(where + e.what());
  } catch (const std::exception& e) {
    throw Error(where + e.what());
  }
}

[[noreturn]] void RethrowAt(std::exception_ptr error, const std::string& stage,
                            std::size_t row) {
  Rethrow(error, stage + ", row " + std::to_string(row) + ": ");
}

std::string SpacedPoint(const Point& p) { return FormatPoint(p, ' '); }

nlohmann::ordered_json Percent(std::size_t count, std::size_t total) {
  if (total == 0) return nullptr;
  return 100.0 * static_cast<double>(count) / static_cast<double>(total);
}

}  // namespace

AuditReport RunAudit(const ActionSet& spec, const Dataset& data,
                     const PredictorFactory& make_model, ReachableDb& db,
                     const AuditOptions& options, const MethodOutputs* method) {
  options.limits.Validate();
  AuditReport report;
  report.spec_hash = SpecHash(spec);
  report.options = options;
  report.n_rows = data.rows.size();
  const std::size_t workers = std::max<std::size_t>(options.workers, 1);

  std::vector<std::unique_ptr<PredictorHandle>> handles;
  for (std::size_t w = 0; w < workers; ++w) {
    auto model = make_model();
    if (model->dimension() != spec.dimension()) {
      throw DomainError("model expects " + std::to_string(model->dimension()) +
                        " features, action set has " +
                        std::to_string(spec.dimension()));
    }
    handles.push_back(
        std::make_unique<PredictorHandle>(std::move(model), options.cache));
  }

  // Distinct points, first row of each.
  std::vector<Point> distinct;
  std::vector<std::size_t> first_row;
  std::vector<std::size_t> row_to_distinct(data.rows.size());
  {
    std::unordered_map<Point, std::size_t, PointHash> index;
    for (std::size_t r = 0; r < data.rows.size(); ++r) {
      auto [it, inserted] = index.try_emplace(data.rows[r], distinct.size());
      if (inserted) {
        distinct.push_back(data.rows[r]);
        first_row.push_back(r);
      }
      row_to_distinct[r] = it->second;
    }
  }

  std::vector<Prediction> predictions;
  {
    constexpr std::size_t kChunk = 4096;
    for (std::size_t start = 0; start < distinct.size(); start += kChunk) {
      const std::size_t n = std::min(kChunk, distinct.size() - start);
      try {
        auto part = handles[0]->Predict(
            std::span<const Point>(distinct).subspan(start, n));
        predictions.insert(predictions.end(), part.begin(), part.end());
      } catch (...) {
        RethrowAt(std::current_exception(), "prediction", first_row[start]);
      }
    }
  }

  const DbStats before = db.stats();
  try {
    // Indices in errors are row numbers.
    db.Extend(data.rows, options.limits, workers);
  } catch (...) {
    Rethrow(std::current_exception(), "reachable sets, ");
  }
  report.canonical_enumerations =
      db.stats().canonical_enumerations - before.canonical_enumerations;
  report.solver_calls = db.stats().solver_calls - before.solver_calls;
  report.db_anchors = db.size();

  // Verify each audited distinct point once; worker w takes every
  // workers-th one so the work split is reproducible.
  std::vector<std::size_t> targets;
  for (std::size_t k = 0; k < distinct.size(); ++k) {
    if (options.all_points || predictions[k] == 0) targets.push_back(k);
  }
  std::vector<VerificationResult> results(targets.size());
  std::vector<std::exception_ptr> errors(targets.size());
  auto work = [&](std::size_t w) {
    for (std::size_t t = w; t < targets.size(); t += workers) {
      try {
        results[t] = VerifyPoint(db.At(distinct[targets[t]]), *handles[w]);
      } catch (...) {
        errors[t] = std::current_exception();
        return;
      }
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(work, w);
    for (auto& t : threads) t.join();
  }
  for (std::size_t t = 0; t < targets.size(); ++t) {
    if (errors[t]) {
      RethrowAt(errors[t], "verification", first_row[targets[t]]);
    }
  }
  for (auto& h : handles) {
    if (auto* ext = dynamic_cast<ExternalPredictor*>(&h->model())) {
      try {
        ext->Close();
      } catch (...) {
        RethrowAt(std::current_exception(), "predictor shutdown",
                  data.rows.empty() ? 0 : data.rows.size() - 1);
      }
    }
    report.model.queries += h->stats().queries;
    report.model.backend_points += h->stats().backend_points;
    report.model.backend_batches += h->stats().backend_batches;
  }

  std::vector<std::optional<std::size_t>> result_of(distinct.size());
  for (std::size_t t = 0; t < targets.size(); ++t) result_of[targets[t]] = t;

  if (method) report.method_eval.emplace();
  for (std::size_t r = 0; r < data.rows.size(); ++r) {
    const std::size_t k = row_to_distinct[r];
    const bool denied = predictions[k] == 0;
    if (denied) ++report.n_denied;
    if (!result_of[k]) continue;
    const ReachableSet& rset = db.At(distinct[k]);
    PointRecord rec;
    rec.row = r;
    rec.x = data.rows[r];
    rec.prediction = predictions[k];
    rec.result = results[*result_of[k]];
    rec.rset_size = rset.size();
    rec.complete = rset.complete();
    if (denied) {
      switch (rec.result.verdict) {
        case Verdict::kYes:
          ++report.n_yes;
          break;
        case Verdict::kNo:
          ++report.n_no;
          break;
        case Verdict::kAbstain:
          ++report.n_abstain;
          break;
      }
      if (method) {
        if (auto it = method->entries.find(r); it != method->entries.end()) {
          try {
            rec.method =
                ClassifyMethodOutput(spec, rec.x, it->second, rec.result);
          } catch (...) {
            RethrowAt(std::current_exception(), "method outputs", r);
          }
          auto& eval = *report.method_eval;
          ++eval.evaluated;
          switch (*rec.method) {
            case MethodVerdict::kValidAction:
              ++eval.valid_actions;
              break;
            case MethodVerdict::kLoophole:
              ++eval.loopholes;
              break;
            case MethodVerdict::kNoAction:
              ++eval.no_action;
              break;
            case MethodVerdict::kBlindspot:
              ++eval.blindspots;
              break;
          }
        }
      }
    }
    report.points.push_back(std::move(rec));
  }
  report.n_audited = report.points.size();
  return report;
}

std::string SummaryJson(const AuditReport& report,
                        const std::string& generated_at) {
  using Json = nlohmann::ordered_json;
  Json j;
  j["spec_hash"] = report.spec_hash;
  j["n_rows"] = report.n_rows;
  j["n_denied"] = report.n_denied;
  j["n_audited"] = report.n_audited;
  j["counts"] = {{"recourse", report.n_yes},
                 {"no_recourse", report.n_no},
                 {"abstain", report.n_abstain}};
  j["pct_recourse"] = Percent(report.n_yes, report.n_denied);
  j["pct_no_recourse"] = Percent(report.n_no, report.n_denied);
  j["pct_abstain"] = Percent(report.n_abstain, report.n_denied);
  if (report.method_eval) {
    const auto& m = *report.method_eval;
    j["method_eval"] = {
        {"n_evaluated", m.evaluated},
        {"valid_actions", m.valid_actions},
        {"loopholes", m.loopholes},
        {"no_action", m.no_action},
        {"blindspots", m.blindspots},
        {"pct_outputs_action",
         Percent(m.valid_actions + m.loopholes, m.evaluated)},
        {"pct_loopholes", Percent(m.loopholes, m.evaluated)},
        {"pct_outputs_no_action",
         Percent(m.no_action + m.blindspots, m.evaluated)},
        {"pct_blindspots", Percent(m.blindspots, m.evaluated)},
    };
  } else {
    j["method_eval"] = nullptr;
  }
  j["reachable_sets"] = {
      {"anchors", report.db_anchors},
      {"canonical_enumerations", report.canonical_enumerations},
      {"solver_calls", report.solver_calls},
  };
  j["model"] = {{"queries", report.model.queries},
                {"backend_points", report.model.backend_points},
                {"backend_batches", report.model.backend_batches}};
  j["options"] = {{"max_points", report.options.limits.max_points},
                  {"max_time", report.options.limits.max_seconds},
                  {"workers", report.options.workers},
                  {"all_points", report.options.all_points}};
  if (!generated_at.empty()) j["generated_at"] = generated_at;
  return j.dump(2) + "\n";
}

void WriteReport(const AuditReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  std::string per_point =
      "row,x,prediction,verdict,witness,rset_size,complete,queries,method\n";
  for (const auto& p : report.points) {
    per_point += std::to_string(p.row) + "," + SpacedPoint(p.x) + "," +
                 std::to_string(p.prediction) + "," +
                 std::string(VerdictName(p.result.verdict)) + "," +
                 (p.result.witness ? SpacedPoint(*p.result.witness) : "") +
                 "," + std::to_string(p.rset_size) + "," +
                 (p.complete ? "1" : "0") + "," +
                 std::to_string(p.result.queries_used) + "," +
                 (p.method ? std::string(MethodVerdictName(*p.method)) : "") +
                 "\n";
  }

  std::vector<const PointRecord*> by_size;
  for (const auto& p : report.points) by_size.push_back(&p);
  std::stable_sort(by_size.begin(), by_size.end(),
                   [](const PointRecord* a, const PointRecord* b) {
                     return a->rset_size < b->rset_size;
                   });
  std::string sizes = "row,anchor,size,complete,verdict\n";
  for (const auto* p : by_size) {
    sizes += std::to_string(p->row) + "," + SpacedPoint(p->x) + "," +
             std::to_string(p->rset_size) + "," + (p->complete ? "1" : "0") +
             "," + std::string(VerdictName(p->result.verdict)) + "\n";
  }

  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm utc{};
  gmtime_r(&t, &utc);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &utc);

  WriteFileAtomic(dir / "per_point.csv", per_point);
  WriteFileAtomic(dir / "summary.json", SummaryJson(report, stamp));
  WriteFileAtomic(dir / "rset_sizes.csv", sizes);
}

}  // namespace reach
