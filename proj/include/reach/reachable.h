#ifndef REACH_REACHABLE_H_
#define REACH_REACHABLE_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <unordered_set>
#include <vector>

#include "reach/action_set.h"
#include "reach/solver.h"

namespace reach {

// Connected components of the constraint graph, each sorted, ordered by their
// smallest feature index. A(x) factors as the product of the per-block sets.
struct FeaturePartition {
  std::vector<std::vector<int>> blocks;
};

FeaturePartition Partition(const ActionSet& spec);

struct ReachLimits {
  std::size_t max_points = 1'000'000;
  double max_seconds = 60.0;
  std::uint64_t node_budget = kDefaultNodeBudget;  // per solve
  bool decompose = true;

  // Throws ValidationError on non-positive limits.
  void Validate() const;
};

struct GenerationStats {
  std::uint64_t solves = 0;
  std::uint64_t nodes = 0;
  double elapsed_seconds = 0;
};

// R(x) or an interior approximation of it. When built by GetReachableSet the
// points are kept per block and the Cartesian product is iterated lazily.
class ReachableSet {
 public:
  struct Block {
    std::vector<int> features;
    // Local coordinates; entry 0 is the anchor's, norms never decrease.
    std::vector<std::vector<Value>> values;
    std::vector<Value> norms;
    bool complete = false;
  };

  ReachableSet() = default;

  // Explicit point list, e.g. loaded from disk. The anchor must be listed and
  // the points distinct. Iteration follows the given order.
  static ReachableSet FromPoints(Point anchor, std::vector<Point> points,
                                 bool complete);
  // Product of per-block sets capped at max_points (in iteration order).
  static ReachableSet FromBlocks(Point anchor, std::vector<Block> blocks,
                                 std::size_t max_points, GenerationStats stats);

  const Point& anchor() const { return anchor_; }
  bool complete() const { return complete_; }
  std::size_t size() const { return size_; }
  const GenerationStats& stats() const { return stats_; }
  const std::vector<Block>& blocks() const { return blocks_; }

  bool Contains(std::span<const Value> p) const;

  // Visits points anchor first, then in non-decreasing L1 distance from the
  // anchor, until `fn` returns false.
  void ForEach(const std::function<bool(const Point&)>& fn) const;
  std::vector<Point> Points() const;

  // Same set re-anchored at `anchor`, which must agree with the current
  // anchor everywhere except on `inert` coordinates; those are rewritten in
  // every point.
  ReachableSet Translate(const Point& anchor, std::span<const int> inert) const;

 private:
  void BuildIndex();

  Point anchor_;
  std::vector<Block> blocks_;
  std::vector<std::unordered_set<std::vector<Value>, PointHash>> index_;
  std::size_t size_ = 0;
  bool complete_ = false;
  bool explicit_order_ = false;
  GenerationStats stats_;
};

// Enumerates R(x) by repeatedly taking the minimum-norm admissible action
// with all earlier answers cut off, until none is left. Runs block by block
// when limits.decompose is set. Features no constraint touches are
// enumerated straight from their interval, and blocks whose every direct
// domain is {0} contribute only x; neither costs a solve.
//
// complete() is true iff every block search ended in a proof of
// infeasibility and the product fits in max_points. Otherwise the result is
// the first max_points points of the norm-ordered product, still containing
// x.
ReachableSet GetReachableSet(const ActionSet& spec, std::span<const Value> x,
                             const ReachLimits& limits = {});

}  // namespace reach

#endif  // REACH_REACHABLE_H_
