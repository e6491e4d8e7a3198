#include "reach/reachable_db.h"

#include <atomic>
#include <exception>
#include <sstream>
#include <thread>

#include "reach/action_set_io.h"

namespace reach {
namespace {

[[noreturn]] void RethrowAt(std::exception_ptr error, std::size_t index,
                            const Point& x) {
  const std::string where =
      "point " + std::to_string(index) + " (" + FormatPoint(x) + "): ";
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

// Runs job(i) for i in [0, n) on up to `workers` threads; returns the first
// failure by job index, if any.
template <typename Job>
std::vector<std::exception_ptr> RunPool(std::size_t n, std::size_t workers,
                                        const Job& job) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto drain = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        job(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    drain();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(drain);
    for (auto& t : threads) t.join();
  }
  return errors;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  return s;
}

}  // namespace

ReachableDb::ReachableDb(const ActionSet& spec)
    : spec_(&spec), spec_hash_(SpecHash(spec)) {
  for (std::size_t j = 0; j < spec.dimension(); ++j) {
    if (!spec.IsKeyFeature(static_cast<int>(j))) {
      inert_.push_back(static_cast<int>(j));
    }
  }
}

Point ReachableDb::CanonicalKey(const Point& x) const {
  Point key;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (spec_->IsKeyFeature(static_cast<int>(j))) key.push_back(x[j]);
  }
  return key;
}

ReachableDb ReachableDb::Build(const ActionSet& spec,
                               std::span<const Point> points,
                               const ReachLimits& limits, std::size_t workers) {
  ReachableDb db(spec);
  db.Extend(points, limits, workers);
  return db;
}

void ReachableDb::Extend(std::span<const Point> points,
                         const ReachLimits& limits, std::size_t workers) {
  limits.Validate();
  // Group missing points by canonical key; the smallest point of each group
  // is enumerated, the rest are translated from it.
  std::map<Point, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Point& x = points[i];
    try {
      spec_->RequireInDomain(x);
    } catch (...) {
      RethrowAt(std::current_exception(), i, x);
    }
    if (sets_.contains(x)) continue;
    groups[CanonicalKey(x)].push_back(i);
  }

  struct Job {
    std::size_t representative;  // index into points
    std::vector<std::size_t> members;
  };
  std::vector<Job> jobs;
  for (auto& [key, members] : groups) {
    std::size_t rep = members.front();
    for (std::size_t i : members) {
      if (points[i] < points[rep]) rep = i;
    }
    jobs.push_back({rep, std::move(members)});
  }

  std::vector<ReachableSet> results(jobs.size());
  auto errors = RunPool(jobs.size(), workers, [&](std::size_t k) {
    results[k] = GetReachableSet(*spec_, points[jobs[k].representative], limits);
  });
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    if (errors[k]) {
      RethrowAt(errors[k], jobs[k].representative,
                points[jobs[k].representative]);
    }
  }

  for (std::size_t k = 0; k < jobs.size(); ++k) {
    const ReachableSet& canonical = results[k];
    ++stats_.canonical_enumerations;
    stats_.solver_calls += canonical.stats().solves;
    for (std::size_t i : jobs[k].members) {
      const Point& x = points[i];
      if (sets_.contains(x)) continue;
      if (x == canonical.anchor()) {
        sets_.emplace(x, canonical);
      } else {
        sets_.emplace(x, canonical.Translate(x, inert_));
      }
    }
  }
}

const ReachableSet& ReachableDb::At(const Point& x) const {
  auto it = sets_.find(x);
  if (it == sets_.end()) {
    throw DomainError("no reachable set stored for (" + FormatPoint(x) + ")");
  }
  return it->second;
}

std::string ReachableDb::Serialize() const {
  std::string out = "spec_hash=" + spec_hash_ + "\n";
  for (const auto& [anchor, rset] : sets_) {
    out += "anchor=" + FormatPoint(anchor) +
           " complete=" + (rset.complete() ? "1" : "0") + "\n";
    rset.ForEach([&](const Point& p) {
      out += FormatPoint(p);
      out.push_back('\n');
      return true;
    });
  }
  return out;
}

void ReachableDb::Save(const std::filesystem::path& path) const {
  WriteFileAtomic(path, Serialize());
}

ReachableDb ReachableDb::Parse(const ActionSet& spec, std::string_view text) {
  ReachableDb db(spec);
  const std::size_t d = spec.dimension();

  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;

  auto read_point = [&](std::string_view s) {
    Point p;
    try {
      p = ParsePoint(s);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), line_no);
    }
    if (p.size() != d) {
      throw ParseError("expected " + std::to_string(d) + " values, got " +
                           std::to_string(p.size()),
                       line_no);
    }
    return p;
  };

  bool have_header = false;
  Point anchor;
  bool complete = false;
  int anchor_line = 0;
  std::vector<Point> pending;
  bool open = false;

  auto flush = [&] {
    if (!open) return;
    try {
      spec.RequireInDomain(anchor);
      for (const Point& p : pending) {
        if (!spec.IsInDomain(p) ||
            !spec.CheckAction(anchor, Difference(p, anchor))) {
          throw ValidationError("(" + FormatPoint(p) +
                                ") is not reachable from the anchor");
        }
      }
      db.sets_.emplace(anchor, ReachableSet::FromPoints(
                                   anchor, std::move(pending), complete));
    } catch (const Error& e) {
      throw ValidationError("line " + std::to_string(anchor_line) + ": " +
                            e.what());
    }
    pending.clear();
    ++db.stats_.loaded_anchors;
    open = false;
  };

  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = Trim(raw);
    if (line.empty()) continue;
    if (!have_header) {
      constexpr std::string_view kKey = "spec_hash=";
      if (!line.starts_with(kKey)) {
        throw ParseError("expected spec_hash=<hex>", line_no);
      }
      std::string_view hash = line.substr(kKey.size());
      if (hash != db.spec_hash_) {
        throw SpecMismatchError("reachable database was built for spec " +
                                std::string(hash) + ", current spec is " +
                                db.spec_hash_);
      }
      have_header = true;
      continue;
    }
    if (line.starts_with("anchor=")) {
      flush();
      std::string_view rest = line.substr(7);
      auto space = rest.find(' ');
      if (space == std::string_view::npos) {
        throw ParseError("expected 'anchor=<csv> complete=<0|1>'", line_no);
      }
      std::string_view flag = Trim(rest.substr(space + 1));
      if (flag != "complete=0" && flag != "complete=1") {
        throw ParseError("expected complete=0 or complete=1", line_no,
                         "complete");
      }
      anchor = read_point(rest.substr(0, space));
      if (db.sets_.contains(anchor)) {
        throw ParseError("duplicate anchor (" + FormatPoint(anchor) + ")",
                         line_no);
      }
      complete = flag.back() == '1';
      anchor_line = line_no;
      open = true;
      continue;
    }
    if (!open) throw ParseError("point listed before any anchor", line_no);
    pending.push_back(read_point(line));
  }
  if (!have_header) throw ParseError("empty reachable database", 1);
  flush();
  return db;
}

ReachableDb ReachableDb::Load(const ActionSet& spec,
                              const std::filesystem::path& path) {
  return Parse(spec, ReadFile(path));
}

}  // namespace reach
