#ifndef REACH_VERIFY_H_
#define REACH_VERIFY_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "reach/action_set.h"
#include "reach/models.h"
#include "reach/rational.h"
#include "reach/reachable.h"

namespace reach {

enum class Verdict { kYes, kNo, kAbstain };
std::string_view VerdictName(Verdict v);  // "yes", "no", "abstain"
std::optional<Verdict> ParseVerdict(std::string_view name);

struct VerificationResult {
  Verdict verdict = Verdict::kAbstain;
  std::optional<Point> witness;  // set iff verdict is yes
  std::uint64_t queries_used = 0;
};

// Queries the model over the set in its iteration order (anchor first) in
// batches of 1, 2, 4, ... up to max_batch points and stops at the first
// positive. yes: some point is positive (complete or not); no: the set is
// complete and every point is negative; abstain: incomplete, all negative.
// Model failures propagate as exceptions.
VerificationResult VerifyPoint(const ReachableSet& rset, PredictorHandle& model,
                               std::size_t max_batch = 1024);

struct LabeledPoint {
  Point x;
  int y = 0;
};

// True iff model_fnr < |{i : y_i = 1, x_i in rset}| / n+, where n+ counts the
// positive examples. Any model with that false negative rate on `data` must
// predict 1 somewhere in rset. Throws ValidationError when there are no
// positives or model_fnr is outside [0, 1].
bool CertifyByFnr(const ReachableSet& rset, std::span<const LabeledPoint> data,
                  const Rational& model_fnr);

// Fraction of positive examples the model predicts 0 on. Throws
// ValidationError when there are no positives.
Rational EmpiricalFnr(PredictorHandle& model, std::span<const LabeledPoint> data);

enum class MethodVerdict { kValidAction, kLoophole, kNoAction, kBlindspot };
std::string_view MethodVerdictName(MethodVerdict v);

// Grades one output of a third-party recourse method at x. A proposed action
// is a loophole when it is not in A(x); no output is a blindspot when the
// ground truth says recourse exists.
MethodVerdict ClassifyMethodOutput(const ActionSet& spec,
                                   std::span<const Value> x,
                                   const std::optional<Action>& proposed,
                                   const VerificationResult& ground_truth);

}  // namespace reach

#endif  // REACH_VERIFY_H_
