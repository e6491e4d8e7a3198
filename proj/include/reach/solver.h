#ifndef REACH_SOLVER_H_
#define REACH_SOLVER_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "reach/action_set.h"
#include "reach/rational.h"

namespace reach {

inline constexpr std::uint64_t kDefaultNodeBudget = 10'000'000;

// Prior optima that a new solution must stay away from (no-good cuts).
struct ExclusionList {
  std::vector<Action> actions;
  Rational epsilon_min{1};
};

enum class SolveStatus { kFound, kInfeasible, kBudgetExhausted };

struct SolveOutcome {
  SolveStatus status = SolveStatus::kInfeasible;
  std::optional<Action> action;
  std::optional<Value> norm;
  std::uint64_t nodes_explored = 0;
};

// Total order used to rank admissible actions: L1 norm first, then the
// coordinates compared by feature index, where a changed coordinate precedes
// an unchanged one, smaller |a_j| precedes larger, and negative precedes
// positive. FindAction returns the minimum of this order.
bool ActionPrecedes(std::span<const Value> a, std::span<const Value> b);

// Resumable branch-and-bound over the actions that move only `features`
// (other coordinates stay 0). Each Next() returns the next admissible nonzero
// action in ActionPrecedes order, so a session behaves like repeatedly solving
// the minimum-norm problem with every earlier answer cut off.
//
// The search deepens one norm level at a time. Inside a level it walks the
// features in index order with values in tie-break order, prunes on the
// remaining norm, and checks each constraint as soon as its last in-scope
// feature is assigned.
class ActionSearch {
 public:
  ActionSearch(const ActionSet& spec, Point x, std::vector<int> features);

  // kFound with a full-length action, kInfeasible once every admissible
  // action has been returned, or kBudgetExhausted after `node_budget` nodes.
  // A budget stop leaves the cursor in place; calling again resumes.
  SolveOutcome Next(std::uint64_t node_budget = kDefaultNodeBudget);

  std::uint64_t nodes_explored() const { return nodes_; }
  bool exhausted() const { return exhausted_; }

 private:
  struct Check {
    enum class Kind { kConstraint, kLink } kind;
    int index;  // constraint index or linkage target
  };

  bool RunChecks(int position) const;

  const ActionSet& spec_;
  Point x_;
  std::vector<int> features_;
  std::vector<std::vector<Value>> candidates_;
  std::vector<Value> suffix_max_;
  std::vector<std::vector<Check>> checks_;

  Action full_;
  std::vector<int> cursor_;
  std::vector<Value> partial_;
  int depth_ = -1;
  Value level_ = 0;
  bool level_open_ = false;
  bool exhausted_ = false;
  std::uint64_t nodes_ = 0;
};

// Minimum-norm admissible action that is at least epsilon_min (L1) away from
// 0 and from every excluded action. kInfeasible is a proof of emptiness.
// Throws DomainError for a bad x, ValidationError for a non-positive radius
// or an exclusion entry that is not itself admissible.
SolveOutcome FindAction(const ActionSet& spec, std::span<const Value> x,
                        const ExclusionList& excluded,
                        std::uint64_t node_budget = kDefaultNodeBudget);

// Whether target = x + a for some a in A(x). Both points must be in the
// domain.
bool IsReachable(const ActionSet& spec, std::span<const Value> x,
                 std::span<const Value> target);

}  // namespace reach

#endif  // REACH_SOLVER_H_
