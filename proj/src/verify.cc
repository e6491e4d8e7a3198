#include "reach/verify.h"

#include <algorithm>

namespace reach {

std::string_view VerdictName(Verdict v) {
  switch (v) {
    case Verdict::kYes:
      return "yes";
    case Verdict::kNo:
      return "no";
    case Verdict::kAbstain:
      return "abstain";
  }
  return "?";
}

std::optional<Verdict> ParseVerdict(std::string_view name) {
  if (name == "yes") return Verdict::kYes;
  if (name == "no") return Verdict::kNo;
  if (name == "abstain") return Verdict::kAbstain;
  return std::nullopt;
}

std::string_view MethodVerdictName(MethodVerdict v) {
  switch (v) {
    case MethodVerdict::kValidAction:
      return "valid_action";
    case MethodVerdict::kLoophole:
      return "loophole";
    case MethodVerdict::kNoAction:
      return "no_action";
    case MethodVerdict::kBlindspot:
      return "blindspot";
  }
  return "?";
}

VerificationResult VerifyPoint(const ReachableSet& rset, PredictorHandle& model,
                               std::size_t max_batch) {
  if (rset.anchor().size() != model.dimension()) {
    throw DomainError("reachable set has dimension " +
                      std::to_string(rset.anchor().size()) +
                      ", model expects " + std::to_string(model.dimension()));
  }
  max_batch = std::max<std::size_t>(max_batch, 1);
  VerificationResult result;
  std::vector<Point> batch;
  std::size_t batch_size = 1;

  auto flush = [&] {
    if (batch.empty()) return false;
    auto answers = model.Predict(batch);
    result.queries_used += batch.size();
    auto hit = std::find(answers.begin(), answers.end(), Prediction{1});
    if (hit != answers.end()) {
      result.verdict = Verdict::kYes;
      result.witness = batch[hit - answers.begin()];
      return true;
    }
    batch.clear();
    batch_size = std::min(batch_size * 2, max_batch);
    return false;
  };

  bool found = false;
  rset.ForEach([&](const Point& p) {
    batch.push_back(p);
    if (batch.size() < batch_size) return true;
    found = flush();
    return !found;
  });
  if (!found) found = flush();
  if (!found) {
    result.verdict = rset.complete() ? Verdict::kNo : Verdict::kAbstain;
  }
  return result;
}

bool CertifyByFnr(const ReachableSet& rset, std::span<const LabeledPoint> data,
                  const Rational& model_fnr) {
  if (model_fnr < Rational(0) || Rational(1) < model_fnr) {
    throw ValidationError("false negative rate " + model_fnr.ToString() +
                          " is outside [0, 1]");
  }
  std::int64_t positives = 0;
  std::int64_t inside = 0;
  for (const auto& item : data) {
    if (item.y != 1) continue;
    ++positives;
    if (rset.Contains(item.x)) ++inside;
  }
  if (positives == 0) {
    throw ValidationError("no positive examples: the threshold is undefined");
  }
  return model_fnr < Rational(inside, positives);
}

Rational EmpiricalFnr(PredictorHandle& model,
                      std::span<const LabeledPoint> data) {
  std::vector<Point> positives;
  for (const auto& item : data) {
    if (item.y == 1) positives.push_back(item.x);
  }
  if (positives.empty()) {
    throw ValidationError("no positive examples: FNR is undefined");
  }
  auto answers = model.Predict(positives);
  const auto misses = std::count(answers.begin(), answers.end(), Prediction{0});
  return Rational(misses, static_cast<std::int64_t>(positives.size()));
}

MethodVerdict ClassifyMethodOutput(const ActionSet& spec,
                                   std::span<const Value> x,
                                   const std::optional<Action>& proposed,
                                   const VerificationResult& ground_truth) {
  if (proposed) {
    return spec.CheckAction(x, *proposed) ? MethodVerdict::kValidAction
                                          : MethodVerdict::kLoophole;
  }
  if (x.size() != spec.dimension()) {
    throw DomainError("point has " + std::to_string(x.size()) +
                      " values, action set has " +
                      std::to_string(spec.dimension()));
  }
  return ground_truth.verdict == Verdict::kYes ? MethodVerdict::kBlindspot
                                               : MethodVerdict::kNoAction;
}

}  // namespace reach
