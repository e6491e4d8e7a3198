#ifndef REACH_ACTION_SET_H_
#define REACH_ACTION_SET_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "reach/common.h"
#include "reach/rational.h"

namespace reach {

enum class ValueType { kBinary, kInteger };
enum class Sign { kFree, kNonNegative, kNonPositive };

struct FeatureSpec {
  std::string name;
  ValueType type = ValueType::kInteger;
  Value lower_bound = 0;
  Value upper_bound = 0;
  bool actionable = false;
  Sign sign = Sign::kFree;

  friend bool operator==(const FeatureSpec&, const FeatureSpec&) = default;
};

// Closed integer interval [lo, hi].
struct IntRange {
  Value lo = 0;
  Value hi = 0;

  bool Contains(Value v) const { return lo <= v && v <= hi; }
  Value size() const { return hi < lo ? 0 : hi - lo + 1; }
  friend bool operator==(const IntRange&, const IntRange&) = default;
};

// L <= sum_j (x_j + a_j) <= U over the listed features.
struct OneHotEncoding {
  std::vector<int> features;
  int min_on = 0;
  int max_on = 1;
  friend bool operator==(const OneHotEncoding&, const OneHotEncoding&) = default;
};

enum class ThermometerDirection { kIncrease, kDecrease };

// Ordered binary dummies, lowest level first. Valid states are 1...10...0;
// actions may only switch dummies on (increase) or only off (decrease).
struct ThermometerEncoding {
  std::vector<int> features;
  ThermometerDirection direction = ThermometerDirection::kIncrease;
  friend bool operator==(const ThermometerEncoding&,
                         const ThermometerEncoding&) = default;
};

struct LinkTarget {
  int feature = 0;
  Rational scale{1};
  friend bool operator==(const LinkTarget&, const LinkTarget&) = default;
};

// An action on `source` induces trunc(scale * a_source) on each target, on top
// of any direct action on the target. The induced part ignores the target's
// actionability and sign, but the total must stay inside the target's bounds.
struct DirectionalLinkage {
  int source = 0;
  std::vector<LinkTarget> targets;
  friend bool operator==(const DirectionalLinkage&,
                         const DirectionalLinkage&) = default;
};

enum class ImplicationBasis {
  kValue,   // x_if + a_if >= threshold  =>  x_then + a_then == forced
  kAction,  // a_if >= threshold         =>  a_then == forced
};

// One-way implication; the contrapositive is not enforced.
struct IfThen {
  int antecedent = 0;
  Value threshold = 0;
  int consequent = 0;
  Value forced = 0;
  ImplicationBasis basis = ImplicationBasis::kValue;
  friend bool operator==(const IfThen&, const IfThen&) = default;
};

// Joint values of `features` must stay in `values`; edges[from][to] says
// whether values[to] can be reached from values[from].
struct ReachabilityMatrix {
  std::vector<int> features;
  std::vector<std::vector<Value>> values;
  std::vector<std::vector<bool>> edges;

  // Index of the joint value of `features` in `p`, or nullopt.
  std::optional<std::size_t> IndexOf(std::span<const Value> p) const;
  friend bool operator==(const ReachabilityMatrix&,
                         const ReachabilityMatrix&) = default;
};

using Constraint = std::variant<OneHotEncoding, ThermometerEncoding,
                                DirectionalLinkage, IfThen, ReachabilityMatrix>;

// Every feature a constraint references, in declaration order.
std::vector<int> ConstraintFeatures(const Constraint& c);
std::string_view ConstraintKind(const Constraint& c);

// A validated action set A(x). Immutable after construction and safe to share
// between threads.
class ActionSet {
 public:
  // Throws ValidationError naming the violated invariant.
  ActionSet(std::vector<FeatureSpec> features,
            std::vector<Constraint> constraints);

  std::size_t dimension() const { return features_.size(); }
  const std::vector<FeatureSpec>& features() const { return features_; }
  const FeatureSpec& feature(int j) const { return features_[j]; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  std::optional<int> FindFeature(std::string_view name) const;

  // A point is in the domain when it lies inside all bounds and satisfies the
  // state part of every encoding constraint (one-hot sums, monotone
  // thermometers, reachability values, value-basis implications). The null
  // action is admissible exactly at these points.
  bool IsInDomain(std::span<const Value> x) const;
  // Throws DomainError describing the first violation.
  void RequireInDomain(std::span<const Value> x) const;

  // a in A(x)? Throws DomainError on dimension mismatch or when x is out of
  // the domain.
  bool CheckAction(std::span<const Value> x, std::span<const Value> a) const;

  // Values a_j may take under the separable rules for j alone. For linkage
  // targets this is the bounds interval, since induced changes bypass sign
  // and actionability.
  IntRange ActionDomain(std::span<const Value> x, int j) const;

  // Separable rules applied to the direct (non-induced) part of a_j.
  bool DirectAllowed(int j, Value direct) const;
  // Bounds intersected with the direct rules.
  IntRange DirectDomain(std::span<const Value> x, int j) const;

  bool IsLinkageTarget(int j) const { return !inducing_[j].empty(); }
  const std::vector<std::pair<int, Rational>>& InducingSources(int j) const {
    return inducing_[j];
  }
  // a_t minus everything induced on t by its sources.
  Value DirectPart(int t, std::span<const Value> a) const;

  // Single constraint evaluated at (x, a); a linkage always holds here since
  // its rule is enforced per target via DirectPart/DirectAllowed.
  bool ConstraintHolds(std::size_t index, std::span<const Value> x,
                       std::span<const Value> a) const;
  bool ConstraintStateValid(std::size_t index, std::span<const Value> x) const;

  // Features whose value in x can change the shape of R(x): actionable
  // features, linkage targets, and anything a constraint reads. The rest are
  // inert; they keep their value in every reachable point.
  bool IsKeyFeature(int j) const { return key_feature_[j]; }

  friend bool operator==(const ActionSet& a, const ActionSet& b) {
    return a.features_ == b.features_ && a.constraints_ == b.constraints_;
  }

 private:
  void Validate() const;
  void CheckDimension(std::span<const Value> v, const char* what) const;

  std::vector<FeatureSpec> features_;
  std::vector<Constraint> constraints_;
  std::vector<std::vector<std::pair<int, Rational>>> inducing_;
  std::vector<bool> key_feature_;
};

// Undirected graph on feature indices: i and j are adjacent iff some
// constraint references both (a linkage joins its source to each target).
struct ConstraintGraph {
  std::vector<std::vector<int>> adjacency;

  bool HasEdge(int i, int j) const;
  std::size_t EdgeCount() const;
};

ConstraintGraph BuildConstraintGraph(const ActionSet& spec);

}  // namespace reach

#endif  // REACH_ACTION_SET_H_
