#ifndef REACH_REACHABLE_DB_H_
#define REACH_REACHABLE_DB_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "reach/action_set.h"
#include "reach/reachable.h"

namespace reach {

class SpecMismatchError : public Error {
 public:
  using Error::Error;
};

struct DbStats {
  std::uint64_t canonical_enumerations = 0;
  std::uint64_t solver_calls = 0;
  std::uint64_t loaded_anchors = 0;
};

// Reachable sets for a collection of points under one action set.
//
// Points that agree on every key feature (see ActionSet::IsKeyFeature) share
// one enumeration: the other coordinates can never move and no constraint
// reads them, so the set is translated per point.
//
// Text format:
//   spec_hash=<16 hex digits>
//   anchor=<csv> complete=<0|1>
//   <csv point>            one line per point, anchor included
//   ...
class ReachableDb {
 public:
  // `spec` must outlive the database.
  explicit ReachableDb(const ActionSet& spec);

  static ReachableDb Build(const ActionSet& spec, std::span<const Point> points,
                           const ReachLimits& limits = {},
                           std::size_t workers = 1);

  // Enumerates the points not stored yet. Errors carry the index of the
  // offending point within `points`.
  void Extend(std::span<const Point> points, const ReachLimits& limits = {},
              std::size_t workers = 1);

  bool Contains(const Point& x) const { return sets_.contains(x); }
  // Throws DomainError when x is absent.
  const ReachableSet& At(const Point& x) const;
  const std::map<Point, ReachableSet>& sets() const { return sets_; }
  std::size_t size() const { return sets_.size(); }
  const DbStats& stats() const { return stats_; }
  const std::string& spec_hash() const { return spec_hash_; }

  std::string Serialize() const;
  void Save(const std::filesystem::path& path) const;

  // Throws SpecMismatchError when the header hash differs from the spec's,
  // ParseError on malformed text, ValidationError when a listed point is not
  // reachable from its anchor.
  static ReachableDb Parse(const ActionSet& spec, std::string_view text);
  static ReachableDb Load(const ActionSet& spec,
                          const std::filesystem::path& path);

 private:
  Point CanonicalKey(const Point& x) const;

  const ActionSet* spec_;
  std::string spec_hash_;
  std::vector<int> inert_;
  std::map<Point, ReachableSet> sets_;
  DbStats stats_;
};

}  // namespace reach

#endif  // REACH_REACHABLE_DB_H_
