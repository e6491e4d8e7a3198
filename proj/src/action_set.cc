#include "reach/action_set.h"

#include <algorithm>
#include <set>
#include <unordered_set>

namespace reach {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr std::string_view kReservedNameChars = ",()[]:=#/ \t\r\n";

}  // namespace

std::optional<std::size_t> ReachabilityMatrix::IndexOf(
    std::span<const Value> p) const {
  for (std::size_t k = 0; k < values.size(); ++k) {
    bool match = true;
    for (std::size_t i = 0; i < features.size() && match; ++i) {
      match = p[features[i]] == values[k][i];
    }
    if (match) return k;
  }
  return std::nullopt;
}

std::vector<int> ConstraintFeatures(const Constraint& c) {
  return std::visit(
      Overloaded{
          [](const OneHotEncoding& k) { return k.features; },
          [](const ThermometerEncoding& k) { return k.features; },
          [](const DirectionalLinkage& k) {
            std::vector<int> out{k.source};
            for (const auto& t : k.targets) out.push_back(t.feature);
            return out;
          },
          [](const IfThen& k) {
            return std::vector<int>{k.antecedent, k.consequent};
          },
          [](const ReachabilityMatrix& k) { return k.features; },
      },
      c);
}

std::string_view ConstraintKind(const Constraint& c) {
  return std::visit(
      Overloaded{
          [](const OneHotEncoding&) { return std::string_view("one_hot"); },
          [](const ThermometerEncoding&) {
            return std::string_view("thermometer");
          },
          [](const DirectionalLinkage&) {
            return std::string_view("linkage");
          },
          [](const IfThen&) { return std::string_view("if_then"); },
          [](const ReachabilityMatrix&) {
            return std::string_view("reachability");
          },
      },
      c);
}

ActionSet::ActionSet(std::vector<FeatureSpec> features,
                     std::vector<Constraint> constraints)
    : features_(std::move(features)), constraints_(std::move(constraints)) {
  Validate();
  const std::size_t d = features_.size();
  inducing_.assign(d, {});
  key_feature_.assign(d, false);
  for (std::size_t j = 0; j < d; ++j) key_feature_[j] = features_[j].actionable;
  for (const auto& c : constraints_) {
    for (int j : ConstraintFeatures(c)) key_feature_[j] = true;
    if (const auto* link = std::get_if<DirectionalLinkage>(&c)) {
      for (const auto& t : link->targets) {
        inducing_[t.feature].emplace_back(link->source, t.scale);
      }
    }
  }
}

void ActionSet::Validate() const {
  const int d = static_cast<int>(features_.size());
  if (d == 0) throw ValidationError("action set has no features");

  std::unordered_set<std::string> names;
  for (const auto& f : features_) {
    if (f.name.empty()) throw ValidationError("feature with empty name");
    if (f.name.find_first_of(kReservedNameChars) != std::string::npos) {
      throw ValidationError("feature name '" + f.name +
                            "' contains a reserved character");
    }
    if (!names.insert(f.name).second) {
      throw ValidationError("duplicate feature name '" + f.name + "'");
    }
    if (f.lower_bound > f.upper_bound) {
      throw ValidationError("bound inversion on '" + f.name + "': lb " +
                            std::to_string(f.lower_bound) + " > ub " +
                            std::to_string(f.upper_bound));
    }
    if (f.type == ValueType::kBinary &&
        (f.lower_bound != 0 || f.upper_bound != 1)) {
      throw ValidationError("binary feature '" + f.name +
                            "' must have bounds [0, 1]");
    }
  }

  auto check_refs = [&](const std::vector<int>& refs, std::string_view kind) {
    std::set<int> seen;
    for (int j : refs) {
      if (j < 0 || j >= d) {
        throw ValidationError(std::string(kind) +
                              " references unknown feature index " +
                              std::to_string(j));
      }
      if (!seen.insert(j).second) {
        throw ValidationError(std::string(kind) + " references '" +
                              features_[j].name + "' more than once");
      }
    }
  };

  // source -> targets, for cycle detection.
  std::vector<std::vector<int>> link_graph(d);

  for (const auto& c : constraints_) {
    const auto kind = ConstraintKind(c);
    check_refs(ConstraintFeatures(c), kind);
    std::visit(
        Overloaded{
            [&](const OneHotEncoding& k) {
              if (k.features.empty()) {
                throw ValidationError("one_hot needs at least one feature");
              }
              if (k.min_on < 0 || k.min_on > k.max_on) {
                throw ValidationError("one_hot limits must satisfy 0 <= min <= max");
              }
            },
            [&](const ThermometerEncoding& k) {
              if (k.features.empty()) {
                throw ValidationError("thermometer needs at least one feature");
              }
              for (int j : k.features) {
                if (features_[j].type != ValueType::kBinary) {
                  throw ValidationError("thermometer feature '" +
                                        features_[j].name + "' is not binary");
                }
              }
            },
            [&](const DirectionalLinkage& k) {
              if (k.targets.empty()) {
                throw ValidationError("linkage from '" +
                                      features_[k.source].name +
                                      "' has no targets");
              }
              for (const auto& t : k.targets) {
                link_graph[k.source].push_back(t.feature);
              }
            },
            [&](const IfThen& k) {
              const auto& then_f = features_[k.consequent];
              if (k.forced < then_f.lower_bound ||
                  k.forced > then_f.upper_bound) {
                if (k.basis == ImplicationBasis::kValue) {
                  throw ValidationError("if_then forces '" + then_f.name +
                                        "' outside its bounds");
                }
              }
              if (k.basis == ImplicationBasis::kAction && k.threshold <= 0 &&
                  k.forced != 0) {
                throw ValidationError(
                    "if_then on actions with threshold <= 0 and nonzero "
                    "forced action would make the null action inadmissible");
              }
            },
            [&](const ReachabilityMatrix& k) {
              const std::size_t n = k.values.size();
              if (n == 0) {
                throw ValidationError("reachability needs at least one value");
              }
              std::set<std::vector<Value>> distinct;
              for (const auto& v : k.values) {
                if (v.size() != k.features.size()) {
                  throw ValidationError(
                      "reachability value tuple has wrong length");
                }
                for (std::size_t i = 0; i < v.size(); ++i) {
                  const auto& f = features_[k.features[i]];
                  if (v[i] < f.lower_bound || v[i] > f.upper_bound) {
                    throw ValidationError("reachability value outside bounds of '" +
                                          f.name + "'");
                  }
                }
                if (!distinct.insert(v).second) {
                  throw ValidationError("reachability values are not distinct");
                }
              }
              if (k.edges.size() != n) {
                throw ValidationError("reachability matrix is not square");
              }
              for (std::size_t i = 0; i < n; ++i) {
                if (k.edges[i].size() != n) {
                  throw ValidationError("reachability matrix is not square");
                }
                if (!k.edges[i][i]) {
                  throw ValidationError(
                      "reachability matrix has a false diagonal entry");
                }
              }
            },
        },
        c);
  }

  // Linkage cycles would let induced changes feed themselves.
  std::vector<int> state(d, 0);  // 0 new, 1 on stack, 2 done
  auto visit = [&](auto&& self, int u) -> void {
    state[u] = 1;
    for (int v : link_graph[u]) {
      if (state[v] == 1) {
        throw ValidationError("linkage cycle through '" + features_[v].name +
                              "'");
      }
      if (state[v] == 0) self(self, v);
    }
    state[u] = 2;
  };
  for (int u = 0; u < d; ++u) {
    if (state[u] == 0) visit(visit, u);
  }
}

std::optional<int> ActionSet::FindFeature(std::string_view name) const {
  for (std::size_t j = 0; j < features_.size(); ++j) {
    if (features_[j].name == name) return static_cast<int>(j);
  }
  return std::nullopt;
}

void ActionSet::CheckDimension(std::span<const Value> v,
                               const char* what) const {
  if (v.size() != features_.size()) {
    throw DomainError(std::string(what) + " has dimension " +
                      std::to_string(v.size()) + ", expected " +
                      std::to_string(features_.size()));
  }
}

bool ActionSet::IsInDomain(std::span<const Value> x) const {
  if (x.size() != features_.size()) return false;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j] < features_[j].lower_bound || x[j] > features_[j].upper_bound) {
      return false;
    }
  }
  for (std::size_t c = 0; c < constraints_.size(); ++c) {
    if (!ConstraintStateValid(c, x)) return false;
  }
  return true;
}

void ActionSet::RequireInDomain(std::span<const Value> x) const {
  CheckDimension(x, "point");
  for (std::size_t j = 0; j < x.size(); ++j) {
    const auto& f = features_[j];
    if (x[j] < f.lower_bound || x[j] > f.upper_bound) {
      throw DomainError("value " + std::to_string(x[j]) + " of '" + f.name +
                        "' is outside [" + std::to_string(f.lower_bound) +
                        ", " + std::to_string(f.upper_bound) + "]");
    }
  }
  for (std::size_t c = 0; c < constraints_.size(); ++c) {
    if (!ConstraintStateValid(c, x)) {
      throw DomainError("point violates " +
                        std::string(ConstraintKind(constraints_[c])) +
                        " constraint #" + std::to_string(c + 1));
    }
  }
}

bool ActionSet::DirectAllowed(int j, Value direct) const {
  const auto& f = features_[j];
  if (!f.actionable) return direct == 0;
  switch (f.sign) {
    case Sign::kNonNegative:
      return direct >= 0;
    case Sign::kNonPositive:
      return direct <= 0;
    case Sign::kFree:
      break;
  }
  return true;
}

IntRange ActionSet::DirectDomain(std::span<const Value> x, int j) const {
  const auto& f = features_[j];
  IntRange r{f.lower_bound - x[j], f.upper_bound - x[j]};
  if (!f.actionable) return {0, 0};
  if (f.sign == Sign::kNonNegative) r.lo = std::max<Value>(r.lo, 0);
  if (f.sign == Sign::kNonPositive) r.hi = std::min<Value>(r.hi, 0);
  return r;
}

IntRange ActionSet::ActionDomain(std::span<const Value> x, int j) const {
  if (j < 0 || static_cast<std::size_t>(j) >= features_.size()) {
    throw DomainError("feature index " + std::to_string(j) + " out of range");
  }
  CheckDimension(x, "point");
  if (IsLinkageTarget(j)) {
    return {features_[j].lower_bound - x[j], features_[j].upper_bound - x[j]};
  }
  return DirectDomain(x, j);
}

Value ActionSet::DirectPart(int t, std::span<const Value> a) const {
  Value direct = a[t];
  for (const auto& [source, scale] : inducing_[t]) {
    direct -= scale.ScaleTruncate(a[source]);
  }
  return direct;
}

bool ActionSet::ConstraintStateValid(std::size_t index,
                                     std::span<const Value> x) const {
  return std::visit(
      Overloaded{
          [&](const OneHotEncoding& k) {
            Value sum = 0;
            for (int j : k.features) sum += x[j];
            return k.min_on <= sum && sum <= k.max_on;
          },
          [&](const ThermometerEncoding& k) {
            bool seen_zero = false;
            for (int j : k.features) {
              if (x[j] == 0) seen_zero = true;
              else if (seen_zero) return false;
            }
            return true;
          },
          [&](const DirectionalLinkage&) { return true; },
          [&](const IfThen& k) {
            if (k.basis == ImplicationBasis::kAction) return true;
            return x[k.antecedent] < k.threshold ||
                   x[k.consequent] == k.forced;
          },
          [&](const ReachabilityMatrix& k) {
            return k.IndexOf(x).has_value();
          },
      },
      constraints_[index]);
}

bool ActionSet::ConstraintHolds(std::size_t index, std::span<const Value> x,
                                std::span<const Value> a) const {
  return std::visit(
      Overloaded{
          [&](const OneHotEncoding& k) {
            Value sum = 0;
            for (int j : k.features) sum += x[j] + a[j];
            return k.min_on <= sum && sum <= k.max_on;
          },
          [&](const ThermometerEncoding& k) {
            const bool increase =
                k.direction == ThermometerDirection::kIncrease;
            bool seen_zero = false;
            for (int j : k.features) {
              const Value after = x[j] + a[j];
              if (increase ? after < x[j] : after > x[j]) return false;
              if (after == 0) seen_zero = true;
              else if (seen_zero) return false;
            }
            return true;
          },
          [&](const DirectionalLinkage&) { return true; },
          [&](const IfThen& k) {
            if (k.basis == ImplicationBasis::kAction) {
              return a[k.antecedent] < k.threshold ||
                     a[k.consequent] == k.forced;
            }
            return x[k.antecedent] + a[k.antecedent] < k.threshold ||
                   x[k.consequent] + a[k.consequent] == k.forced;
          },
          [&](const ReachabilityMatrix& k) {
            auto from = k.IndexOf(x);
            if (!from) return false;
            Point after(x.begin(), x.end());
            for (int j : k.features) after[j] += a[j];
            auto to = k.IndexOf(after);
            return to.has_value() && k.edges[*from][*to];
          },
      },
      constraints_[index]);
}

bool ActionSet::CheckAction(std::span<const Value> x,
                            std::span<const Value> a) const {
  CheckDimension(a, "action");
  RequireInDomain(x);
  for (std::size_t j = 0; j < features_.size(); ++j) {
    const Value after = x[j] + a[j];
    if (after < features_[j].lower_bound || after > features_[j].upper_bound) {
      return false;
    }
    const int jj = static_cast<int>(j);
    if (!DirectAllowed(jj, IsLinkageTarget(jj) ? DirectPart(jj, a) : a[j])) {
      return false;
    }
  }
  for (std::size_t c = 0; c < constraints_.size(); ++c) {
    if (!ConstraintHolds(c, x, a)) return false;
  }
  return true;
}

bool ConstraintGraph::HasEdge(int i, int j) const {
  const auto& adj = adjacency[i];
  return std::binary_search(adj.begin(), adj.end(), j);
}

std::size_t ConstraintGraph::EdgeCount() const {
  std::size_t twice = 0;
  for (const auto& adj : adjacency) twice += adj.size();
  return twice / 2;
}

ConstraintGraph BuildConstraintGraph(const ActionSet& spec) {
  std::vector<std::set<int>> adj(spec.dimension());
  auto link = [&](int i, int j) {
    if (i == j) return;
    adj[i].insert(j);
    adj[j].insert(i);
  };
  for (const auto& c : spec.constraints()) {
    if (const auto* k = std::get_if<DirectionalLinkage>(&c)) {
      for (const auto& t : k->targets) link(k->source, t.feature);
      continue;
    }
    const auto refs = ConstraintFeatures(c);
    for (std::size_t i = 0; i < refs.size(); ++i) {
      for (std::size_t j = i + 1; j < refs.size(); ++j) link(refs[i], refs[j]);
    }
  }
  ConstraintGraph g;
  g.adjacency.reserve(adj.size());
  for (const auto& s : adj) g.adjacency.emplace_back(s.begin(), s.end());
  return g;
}

}  // namespace reach
