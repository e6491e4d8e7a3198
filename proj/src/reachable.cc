#include "reach/reachable.h"

#include <algorithm>
#include <chrono>
#include <limits>
#include <map>

#include "union_find.h"

namespace reach {
namespace {

using Clock = std::chrono::steady_clock;

std::size_t SaturatingProduct(const std::vector<ReachableSet::Block>& blocks) {
  std::size_t product = 1;
  for (const auto& b : blocks) {
    const std::size_t n = b.values.size();
    if (n != 0 && product > std::numeric_limits<std::size_t>::max() / n) {
      return std::numeric_limits<std::size_t>::max();
    }
    product *= n;
  }
  return product;
}

std::vector<Value> Project(std::span<const Value> p,
                           const std::vector<int>& features) {
  std::vector<Value> out;
  out.reserve(features.size());
  for (int j : features) out.push_back(p[j]);
  return out;
}

// Walks the product of per-block lists in order of total norm. Each block's
// list is grouped into runs of equal norm; for every total N we pick one run
// per block whose norms add up to N and emit that sub-product.
class NormOrderedProduct {
 public:
  NormOrderedProduct(const Point& anchor,
                     const std::vector<ReachableSet::Block>& blocks,
                     const std::function<bool(const Point&)>& fn)
      : blocks_(blocks), fn_(fn), point_(anchor) {
    const std::size_t k = blocks_.size();
    runs_.resize(k);
    for (std::size_t b = 0; b < k; ++b) {
      const auto& norms = blocks_[b].norms;
      for (std::size_t i = 0; i < norms.size(); ++i) {
        if (i == 0 || norms[i] != norms[i - 1]) {
          runs_[b].push_back({norms[i], i, i + 1});
        } else {
          runs_[b].back().end = i + 1;
        }
      }
    }
    suffix_max_.assign(k + 1, 0);
    for (std::size_t b = k; b-- > 0;) {
      suffix_max_[b] =
          suffix_max_[b + 1] + (runs_[b].empty() ? 0 : runs_[b].back().norm);
    }
    chosen_.assign(k, 0);
  }

  void Run() {
    for (Value total = 0; total <= suffix_max_[0]; ++total) {
      if (!Choose(0, total)) return;
    }
  }

 private:
  struct NormRun {
    Value norm;
    std::size_t begin, end;
  };

  bool Choose(std::size_t b, Value remaining) {
    if (b == blocks_.size()) return remaining == 0 ? Emit(0) : true;
    // Larger moves on earlier blocks first, mirroring the solver's order of
    // preferring changes at low feature indices.
    for (std::size_t r = runs_[b].size(); r-- > 0;) {
      const Value n = runs_[b][r].norm;
      if (n > remaining) continue;
      if (remaining - n > suffix_max_[b + 1]) break;
      chosen_[b] = r;
      if (!Choose(b + 1, remaining - n)) return false;
    }
    return true;
  }

  bool Emit(std::size_t b) {
    if (b == blocks_.size()) return fn_(point_);
    const auto& block = blocks_[b];
    const NormRun& run = runs_[b][chosen_[b]];
    for (std::size_t i = run.begin; i < run.end; ++i) {
      for (std::size_t q = 0; q < block.features.size(); ++q) {
        point_[block.features[q]] = block.values[i][q];
      }
      if (!Emit(b + 1)) return false;
    }
    return true;
  }

  const std::vector<ReachableSet::Block>& blocks_;
  const std::function<bool(const Point&)>& fn_;
  Point point_;
  std::vector<std::vector<NormRun>> runs_;
  std::vector<Value> suffix_max_;
  std::vector<std::size_t> chosen_;
};

// True when no admissible action moves any feature of `block`, found
// without search: direct domains pruned to arc consistency over every
// constraint that involves no linkage (a linked feature's constraints see its
// total change, not the direct part). Pruning only drops moves no admissible
// action uses, so true is a proof; false means "search".
bool ProvablyFrozen(const ActionSet& spec, const Point& x,
                    std::span<const int> block) {
  constexpr Value kMaxDomain = 256;
  constexpr std::size_t kMaxCombos = 4096;
  const std::size_t d = spec.dimension();
  std::vector<std::vector<Value>> moves(d);
  std::vector<bool> opaque(d, false);  // not pruned; any move counts
  for (int j : block) {
    const IntRange r = spec.DirectDomain(x, j);
    opaque[j] = spec.IsLinkageTarget(j) || r.size() > kMaxDomain;
    if (opaque[j] && (r.lo != 0 || r.hi != 0)) return false;
    for (Value v = r.lo; v <= r.hi; ++v) moves[j].push_back(v);
  }

  // A source move must leave each single-source target a direct part that
  // lands it back inside its bounds.
  for (const auto& c : spec.constraints()) {
    const auto* lk = std::get_if<DirectionalLinkage>(&c);
    if (!lk || opaque[lk->source] ||
        std::find(block.begin(), block.end(), lk->source) == block.end()) {
      continue;
    }
    auto& m = moves[lk->source];
    std::erase_if(m, [&](Value v) {
      for (const auto& t : lk->targets) {
        if (spec.InducingSources(t.feature).size() != 1) continue;
        const FeatureSpec& f = spec.feature(t.feature);
        const Value moved = x[t.feature] + t.scale.ScaleTruncate(v);
        Value lo = f.lower_bound - moved, hi = f.upper_bound - moved;
        if (!f.actionable) {
          if (lo > 0 || hi < 0) return true;
          continue;
        }
        if (f.sign == Sign::kNonNegative) lo = std::max<Value>(lo, 0);
        if (f.sign == Sign::kNonPositive) hi = std::min<Value>(hi, 0);
        if (lo > hi) return true;
      }
      return false;
    });
  }

  std::vector<std::size_t> scopes;
  for (std::size_t i = 0; i < spec.constraints().size(); ++i) {
    auto f = ConstraintFeatures(spec.constraints()[i]);
    if (std::find(block.begin(), block.end(), f.front()) == block.end()) continue;
    if (std::none_of(f.begin(), f.end(), [&](int j) { return opaque[j]; })) {
      scopes.push_back(i);
    }
  }

  Action a(d, 0);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i : scopes) {
      auto f = ConstraintFeatures(spec.constraints()[i]);
      std::sort(f.begin(), f.end());
      f.erase(std::unique(f.begin(), f.end()), f.end());
      std::size_t combos = 1;
      for (int j : f) {
        combos *= moves[j].size();
        if (combos > kMaxCombos) break;
      }
      if (combos > kMaxCombos) continue;
      std::vector<std::vector<bool>> supported(f.size());
      for (std::size_t k = 0; k < f.size(); ++k) {
        supported[k].assign(moves[f[k]].size(), false);
      }
      std::vector<std::size_t> pick(f.size(), 0);
      for (std::size_t n = 0; n < combos; ++n) {
        for (std::size_t k = 0; k < f.size(); ++k) a[f[k]] = moves[f[k]][pick[k]];
        if (spec.ConstraintHolds(i, x, a)) {
          for (std::size_t k = 0; k < f.size(); ++k) supported[k][pick[k]] = true;
        }
        for (std::size_t k = 0; k < f.size() && ++pick[k] == moves[f[k]].size(); ++k) {
          pick[k] = 0;
        }
      }
      for (int j : f) a[j] = 0;
      for (std::size_t k = 0; k < f.size(); ++k) {
        auto& m = moves[f[k]];
        std::vector<Value> kept;
        for (std::size_t v = 0; v < m.size(); ++v) {
          if (supported[k][v]) kept.push_back(m[v]);
        }
        if (kept.size() != m.size()) {
          m = std::move(kept);
          changed = true;
        }
      }
    }
  }
  return std::all_of(block.begin(), block.end(), [&](int j) {
    return moves[j].size() == 1 && moves[j][0] == 0;
  });
}

}  // namespace

FeaturePartition Partition(const ActionSet& spec) {
  const std::size_t d = spec.dimension();
  UnionFind sets(d);
  const ConstraintGraph graph = BuildConstraintGraph(spec);
  for (std::size_t i = 0; i < d; ++i) {
    for (int j : graph.adjacency[i]) sets.Unite(i, static_cast<std::size_t>(j));
  }
  std::map<std::size_t, std::vector<int>> by_root;
  std::vector<std::size_t> root_order;
  for (std::size_t j = 0; j < d; ++j) {
    auto root = sets.Find(j);
    auto [it, inserted] = by_root.try_emplace(root);
    if (inserted) root_order.push_back(root);
    it->second.push_back(static_cast<int>(j));
  }
  FeaturePartition out;
  for (auto root : root_order) out.blocks.push_back(std::move(by_root[root]));
  return out;
}

void ReachLimits::Validate() const {
  if (max_points == 0) throw ValidationError("max_points must be positive");
  if (!(max_seconds > 0)) throw ValidationError("max_time must be positive");
  if (node_budget == 0) throw ValidationError("node budget must be positive");
}

ReachableSet ReachableSet::FromPoints(Point anchor, std::vector<Point> points,
                                      bool complete) {
  ReachableSet set;
  Block block;
  block.features.resize(anchor.size());
  for (std::size_t j = 0; j < anchor.size(); ++j) {
    block.features[j] = static_cast<int>(j);
  }
  bool has_anchor = false;
  for (auto& p : points) {
    if (p.size() != anchor.size()) {
      throw DomainError("reachable point (" + FormatPoint(p) +
                        ") has the wrong dimension");
    }
    has_anchor = has_anchor || p == anchor;
    block.norms.push_back(L1Distance(p, anchor));
    block.values.push_back(std::move(p));
  }
  if (!has_anchor) {
    throw ValidationError("reachable set for (" + FormatPoint(anchor) +
                          ") does not contain its anchor");
  }
  block.complete = complete;
  set.anchor_ = std::move(anchor);
  set.size_ = block.values.size();
  set.complete_ = complete;
  set.explicit_order_ = true;
  set.blocks_.push_back(std::move(block));
  set.BuildIndex();
  if (set.index_[0].size() != set.size_) {
    throw ValidationError("reachable set lists a point twice");
  }
  return set;
}

ReachableSet ReachableSet::FromBlocks(Point anchor, std::vector<Block> blocks,
                                      std::size_t max_points,
                                      GenerationStats stats) {
  ReachableSet set;
  set.anchor_ = std::move(anchor);
  set.stats_ = stats;
  const std::size_t product = SaturatingProduct(blocks);
  bool all_complete = true;
  for (const auto& b : blocks) all_complete = all_complete && b.complete;

  if (product <= max_points) {
    set.blocks_ = std::move(blocks);
    set.size_ = product;
    set.complete_ = all_complete;
    set.BuildIndex();
    return set;
  }

  // Too large to expose whole: keep the leading max_points of the product.
  std::vector<Point> head;
  head.reserve(max_points);
  std::function<bool(const Point&)> take = [&](const Point& p) {
    head.push_back(p);
    return head.size() < max_points;
  };
  NormOrderedProduct(set.anchor_, blocks, take).Run();
  ReachableSet capped = FromPoints(set.anchor_, std::move(head), false);
  capped.stats_ = stats;
  return capped;
}

void ReachableSet::BuildIndex() {
  index_.clear();
  for (const auto& b : blocks_) {
    index_.emplace_back(b.values.begin(), b.values.end());
  }
}

bool ReachableSet::Contains(std::span<const Value> p) const {
  if (p.size() != anchor_.size()) return false;
  std::vector<Value> local;
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    local.clear();
    for (int j : blocks_[b].features) local.push_back(p[j]);
    if (!index_[b].contains(local)) return false;
  }
  return true;
}

void ReachableSet::ForEach(const std::function<bool(const Point&)>& fn) const {
  if (blocks_.empty()) return;
  if (explicit_order_ || blocks_.size() == 1) {
    Point p = anchor_;
    const auto& block = blocks_.front();
    // Anchor first even if a loaded list put it elsewhere.
    auto local_anchor = Project(anchor_, block.features);
    if (!fn(anchor_)) return;
    for (const auto& v : block.values) {
      if (v == local_anchor) continue;
      for (std::size_t q = 0; q < block.features.size(); ++q) {
        p[block.features[q]] = v[q];
      }
      if (!fn(p)) return;
    }
    return;
  }
  NormOrderedProduct(anchor_, blocks_, fn).Run();
}

std::vector<Point> ReachableSet::Points() const {
  std::vector<Point> out;
  out.reserve(size_);
  ForEach([&](const Point& p) {
    out.push_back(p);
    return true;
  });
  return out;
}

ReachableSet ReachableSet::Translate(const Point& anchor,
                                     std::span<const int> inert) const {
  ReachableSet out = *this;
  out.anchor_ = anchor;
  for (auto& block : out.blocks_) {
    for (std::size_t q = 0; q < block.features.size(); ++q) {
      const int j = block.features[q];
      if (std::find(inert.begin(), inert.end(), j) == inert.end()) continue;
      for (auto& v : block.values) v[q] = anchor[j];
    }
  }
  out.BuildIndex();
  return out;
}

ReachableSet GetReachableSet(const ActionSet& spec, std::span<const Value> x,
                             const ReachLimits& limits) {
  limits.Validate();
  spec.RequireInDomain(x);
  const auto start = Clock::now();
  const auto deadline =
      start + std::chrono::duration_cast<Clock::duration>(
                  std::chrono::duration<double>(limits.max_seconds));
  const Point anchor(x.begin(), x.end());
  const std::size_t d = spec.dimension();

  std::vector<std::vector<int>> groups;
  if (limits.decompose) {
    groups = Partition(spec).blocks;
  } else {
    groups.emplace_back(d);
    for (std::size_t j = 0; j < d; ++j) groups[0][j] = static_cast<int>(j);
  }
  std::vector<bool> constrained(d, false);
  for (const auto& c : spec.constraints()) {
    for (int j : ConstraintFeatures(c)) constrained[j] = true;
  }

  GenerationStats stats;
  std::vector<ReachableSet::Block> blocks;
  for (auto& features : groups) {
    ReachableSet::Block block;
    block.features = features;
    block.values.push_back(Project(anchor, features));
    block.norms.push_back(0);

    const bool frozen = ProvablyFrozen(spec, anchor, features);
    if (frozen) {
      block.complete = true;
    } else if (features.size() == 1 && !constrained[features[0]]) {
      // A lone unconstrained feature: its interval is its reachable set.
      const int j = features[0];
      const IntRange r = spec.DirectDomain(anchor, j);
      std::vector<Value> moves;
      for (Value v = r.lo; v <= r.hi; ++v) {
        if (v != 0) moves.push_back(v);
      }
      std::stable_sort(moves.begin(), moves.end(), [](Value a, Value b) {
        const Value aa = a < 0 ? -a : a, bb = b < 0 ? -b : b;
        return aa != bb ? aa < bb : a < b;
      });
      block.complete = true;
      for (Value v : moves) {
        if (block.values.size() > limits.max_points) {
          block.complete = false;
          break;
        }
        block.values.push_back({anchor[j] + v});
        block.norms.push_back(v < 0 ? -v : v);
      }
    } else {
      ActionSearch search(spec, anchor, features);
      while (true) {
        // One point past the cap proves the product overflows it.
        if (block.values.size() > limits.max_points ||
            Clock::now() >= deadline) {
          break;
        }
        SolveOutcome step = search.Next(limits.node_budget);
        ++stats.solves;
        if (step.status == SolveStatus::kInfeasible) {
          block.complete = true;
          break;
        }
        if (step.status == SolveStatus::kBudgetExhausted) break;
        block.values.push_back(Project(Apply(anchor, *step.action), features));
        block.norms.push_back(*step.norm);
      }
      stats.nodes += search.nodes_explored();
    }
    blocks.push_back(std::move(block));
  }
  stats.elapsed_seconds =
      std::chrono::duration<double>(Clock::now() - start).count();
  return ReachableSet::FromBlocks(anchor, std::move(blocks), limits.max_points,
                                  stats);
}

}  // namespace reach
