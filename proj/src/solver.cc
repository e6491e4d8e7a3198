#include "reach/solver.h"

#include <algorithm>
#include <unordered_set>

namespace reach {
namespace {

Value Abs(Value v) { return v < 0 ? -v : v; }

// Per-coordinate rank in the tie-break order.
bool ValuePrecedes(Value a, Value b) {
  if ((a == 0) != (b == 0)) return a != 0;
  if (Abs(a) != Abs(b)) return Abs(a) < Abs(b);
  return a < b;
}

}  // namespace

bool ActionPrecedes(std::span<const Value> a, std::span<const Value> b) {
  const Value na = L1Norm(a), nb = L1Norm(b);
  if (na != nb) return na < nb;
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (a[j] != b[j]) return ValuePrecedes(a[j], b[j]);
  }
  return false;
}

ActionSearch::ActionSearch(const ActionSet& spec, Point x,
                           std::vector<int> features)
    : spec_(spec), x_(std::move(x)), features_(std::move(features)) {
  std::sort(features_.begin(), features_.end());
  features_.erase(std::unique(features_.begin(), features_.end()),
                  features_.end());
  const int m = static_cast<int>(features_.size());
  const int d = static_cast<int>(spec_.dimension());

  std::vector<int> position(d, -1);
  for (int p = 0; p < m; ++p) position[features_[p]] = p;

  candidates_.resize(m);
  for (int p = 0; p < m; ++p) {
    const IntRange r = spec_.ActionDomain(x_, features_[p]);
    auto& c = candidates_[p];
    for (Value v = r.lo; v <= r.hi; ++v) c.push_back(v);
    std::sort(c.begin(), c.end(), ValuePrecedes);  // zero ends up last
  }
  suffix_max_.assign(m + 1, 0);
  for (int p = m - 1; p >= 0; --p) {
    Value widest = 0;
    for (Value v : candidates_[p]) widest = std::max(widest, Abs(v));
    suffix_max_[p] = suffix_max_[p + 1] + widest;
  }

  // A check fires at the deepest position among the in-block features it
  // reads; out-of-block features are pinned at 0.
  checks_.resize(m);
  auto last_position = [&](const std::vector<int>& scope) {
    int last = -1;
    for (int j : scope) last = std::max(last, position[j]);
    return last;
  };
  for (std::size_t c = 0; c < spec_.constraints().size(); ++c) {
    const auto& con = spec_.constraints()[c];
    if (std::holds_alternative<DirectionalLinkage>(con)) continue;
    int last = last_position(ConstraintFeatures(con));
    if (last >= 0) {
      checks_[last].push_back({Check::Kind::kConstraint, static_cast<int>(c)});
    }
  }
  for (int t = 0; t < d; ++t) {
    if (!spec_.IsLinkageTarget(t)) continue;
    std::vector<int> scope{t};
    for (const auto& [source, scale] : spec_.InducingSources(t)) {
      scope.push_back(source);
    }
    int last = last_position(scope);
    if (last >= 0) checks_[last].push_back({Check::Kind::kLink, t});
  }

  full_.assign(d, 0);
  cursor_.assign(m, -1);
  partial_.assign(m + 1, 0);
  if (m == 0) exhausted_ = true;
}

bool ActionSearch::RunChecks(int position) const {
  for (const auto& check : checks_[position]) {
    if (check.kind == Check::Kind::kConstraint) {
      if (!spec_.ConstraintHolds(check.index, x_, full_)) return false;
    } else if (!spec_.DirectAllowed(check.index,
                                    spec_.DirectPart(check.index, full_))) {
      return false;
    }
  }
  return true;
}

SolveOutcome ActionSearch::Next(std::uint64_t node_budget) {
  SolveOutcome out;
  const std::uint64_t start = nodes_;
  const int m = static_cast<int>(features_.size());
  while (!exhausted_) {
    if (!level_open_) {
      if (level_ >= suffix_max_[0]) {
        exhausted_ = true;
        break;
      }
      ++level_;
      depth_ = 0;
      cursor_[0] = -1;
      partial_[0] = 0;
      level_open_ = true;
    }
    while (depth_ >= 0) {
      if (nodes_ - start >= node_budget) {
        out.status = SolveStatus::kBudgetExhausted;
        out.nodes_explored = nodes_ - start;
        return out;
      }
      const int p = depth_;
      const auto& cands = candidates_[p];
      int& i = cursor_[p];
      if (++i >= static_cast<int>(cands.size())) {
        full_[features_[p]] = 0;
        i = -1;
        --depth_;
        continue;
      }
      const Value v = cands[i];
      const Value room = level_ - partial_[p];
      if (Abs(v) > room) {
        // Nonzero candidates only grow from here; zero is last.
        i = static_cast<int>(cands.size()) - 2;
        continue;
      }
      ++nodes_;
      const Value rest = room - Abs(v);
      if (rest > suffix_max_[p + 1]) continue;
      full_[features_[p]] = v;
      if (!RunChecks(p)) continue;
      if (p == m - 1) {
        if (rest != 0) continue;
        out.status = SolveStatus::kFound;
        out.action = full_;
        out.norm = level_;
        out.nodes_explored = nodes_ - start;
        return out;
      }
      partial_[p + 1] = partial_[p] + Abs(v);
      depth_ = p + 1;
      cursor_[depth_] = -1;
    }
    level_open_ = false;
  }
  out.status = SolveStatus::kInfeasible;
  out.nodes_explored = nodes_ - start;
  return out;
}

SolveOutcome FindAction(const ActionSet& spec, std::span<const Value> x,
                        const ExclusionList& excluded,
                        std::uint64_t node_budget) {
  spec.RequireInDomain(x);
  if (!excluded.epsilon_min.IsPositive()) {
    throw ValidationError("epsilon_min must be positive");
  }
  for (const auto& a : excluded.actions) {
    if (a.size() != spec.dimension()) {
      throw DomainError("excluded action has dimension " +
                        std::to_string(a.size()));
    }
    if (!spec.CheckAction(x, a)) {
      throw ValidationError("inconsistent exclusion list: action (" +
                            FormatPoint(a) + ") is not admissible");
    }
  }
  // L1 distances between integer vectors are integers, so "distance >= eps"
  // is "distance >= ceil(eps)".
  const Rational& eps = excluded.epsilon_min;
  const Value radius = (eps.num() + eps.den() - 1) / eps.den();

  std::unordered_set<Action, PointHash> banned;
  if (radius <= 1) banned.insert(excluded.actions.begin(), excluded.actions.end());
  auto is_excluded = [&](const Action& a) {
    if (radius <= 1) return banned.contains(a);
    if (L1Norm(a) < radius) return true;
    for (const auto& e : excluded.actions) {
      if (L1Distance(a, e) < radius) return true;
    }
    return false;
  };

  std::vector<int> all(spec.dimension());
  for (std::size_t j = 0; j < all.size(); ++j) all[j] = static_cast<int>(j);
  ActionSearch search(spec, Point(x.begin(), x.end()), std::move(all));

  SolveOutcome out;
  while (true) {
    const std::uint64_t used = search.nodes_explored();
    if (used >= node_budget) {
      out.status = SolveStatus::kBudgetExhausted;
      break;
    }
    SolveOutcome step = search.Next(node_budget - used);
    if (step.status != SolveStatus::kFound) {
      out.status = step.status;
      break;
    }
    if (!is_excluded(*step.action)) {
      out = std::move(step);
      break;
    }
  }
  out.nodes_explored = search.nodes_explored();
  return out;
}

bool IsReachable(const ActionSet& spec, std::span<const Value> x,
                 std::span<const Value> target) {
  spec.RequireInDomain(x);
  spec.RequireInDomain(target);
  return spec.CheckAction(x, Difference(target, x));
}

}  // namespace reach
