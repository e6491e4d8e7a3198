#include <gtest/gtest.h>

#include <filesystem>
#include <set>

#include "reach/action_set_io.h"
#include "reach/reachable_db.h"
#include "test_util.h"

namespace reach {
namespace {

using testing::Fig1Spec;

std::set<Point> AsSet(const ReachableSet& r) {
  auto pts = r.Points();
  return {pts.begin(), pts.end()};
}

ActionSet LinkedSpec() {
  return ActionSet({{"age", ValueType::kInteger, 19, 75, false, Sign::kFree},
                    {"foreign", ValueType::kBinary, 0, 1, false, Sign::kFree},
                    {"years", ValueType::kInteger, 0, 7, true, Sign::kNonNegative},
                    {"rate", ValueType::kInteger, 1, 4, false, Sign::kFree}},
                   {DirectionalLinkage{2, {{0, Rational(1)}}}});
}

TEST(ReachableDbTest, ImmutableDifferencesShareOneEnumeration) {
  ActionSet spec = LinkedSpec();
  std::vector<Point> points{{30, 0, 2, 1}, {30, 1, 2, 4}};
  auto db = ReachableDb::Build(spec, points);
  EXPECT_EQ(db.size(), 2u);
  EXPECT_EQ(db.stats().canonical_enumerations, 1u);
  for (const auto& x : points) {
    EXPECT_EQ(db.At(x).anchor(), x);
    EXPECT_EQ(AsSet(db.At(x)), AsSet(GetReachableSet(spec, x)));
  }
  // Age is a linkage target, so it belongs to the key.
  db.Extend(std::vector<Point>{{31, 0, 2, 1}});
  EXPECT_EQ(db.stats().canonical_enumerations, 2u);
}

TEST(ReachableDbTest, SolverRunsOnceForSharedPoints) {
  ActionSet spec({{"frozen", ValueType::kInteger, 0, 9, false, Sign::kFree},
                  {"a", ValueType::kBinary, 0, 1, true, Sign::kFree},
                  {"b", ValueType::kBinary, 0, 1, true, Sign::kFree}},
                 {OneHotEncoding{{1, 2}, 1, 1}});
  auto db = ReachableDb::Build(spec, std::vector<Point>{{3, 1, 0}, {8, 1, 0}});
  auto alone = GetReachableSet(spec, Point{3, 1, 0});
  EXPECT_EQ(db.stats().canonical_enumerations, 1u);
  EXPECT_EQ(db.stats().solver_calls, alone.stats().solves);
  EXPECT_GT(alone.stats().solves, 0u);
}

TEST(ReachableDbTest, DuplicatesCollapse) {
  ActionSet spec = Fig1Spec();
  auto db = ReachableDb::Build(spec, std::vector<Point>{{0, 1}, {0, 1}, {0, 1}});
  EXPECT_EQ(db.size(), 1u);
}

TEST(ReachableDbTest, Fig1CellSizes) {
  ActionSet spec = Fig1Spec();
  std::vector<Point> cells{{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  auto db = ReachableDb::Build(spec, cells);
  std::vector<std::size_t> sizes;
  for (const auto& x : cells) sizes.push_back(db.At(x).size());
  EXPECT_EQ(sizes, (std::vector<std::size_t>{4, 2, 2, 1}));
  EXPECT_EQ(AsSet(db.At({0, 1})), (std::set<Point>{{0, 1}, {1, 1}}));
  EXPECT_EQ(AsSet(db.At({1, 0})), (std::set<Point>{{1, 0}, {1, 1}}));
}

TEST(ReachableDbTest, MatchesIndependentCalls) {
  for (const auto& c : testing::RandomCorpus(60, 51)) {
    std::vector<Point> pts;
    for (const Point& y : testing::Grid(c.spec)) {
      if (c.spec.IsInDomain(y)) pts.push_back(y);
      if (pts.size() == 25) break;
    }
    auto db = ReachableDb::Build(c.spec, pts, {}, 2);
    for (const auto& x : pts) {
      auto solo = GetReachableSet(c.spec, x);
      ASSERT_EQ(AsSet(db.At(x)), AsSet(solo));
      ASSERT_EQ(db.At(x).complete(), solo.complete());
    }
  }
}

TEST(ReachableDbTest, SaveLoadRoundTrip) {
  ActionSet spec = LinkedSpec();
  std::vector<Point> points{{30, 0, 2, 1}, {30, 1, 2, 4}, {75, 0, 7, 2}};
  auto db = ReachableDb::Build(spec, points);
  auto path = std::filesystem::temp_directory_path() / "reach_db_test.rdb";
  db.Save(path);
  auto loaded = ReachableDb::Load(spec, path);
  EXPECT_EQ(loaded.size(), db.size());
  EXPECT_EQ(loaded.stats().solver_calls, 0u);
  EXPECT_EQ(loaded.stats().loaded_anchors, 3u);
  for (const auto& x : points) {
    EXPECT_EQ(loaded.At(x).Points(), db.At(x).Points());
    EXPECT_EQ(loaded.At(x).complete(), db.At(x).complete());
  }
  EXPECT_EQ(loaded.Serialize(), db.Serialize());
  std::filesystem::remove(path);
}

TEST(ReachableDbTest, TextFormat) {
  ActionSet spec = Fig1Spec();
  auto db = ReachableDb::Build(spec, std::vector<Point>{{1, 0}});
  EXPECT_EQ(db.Serialize(), "spec_hash=" + SpecHash(spec) +
                                "\nanchor=1,0 complete=1\n1,0\n1,1\n");
}

TEST(ReachableDbTest, LoaderRejectsBadInput) {
  ActionSet spec = Fig1Spec();
  const std::string head = "spec_hash=" + SpecHash(spec) + "\n";
  EXPECT_THROW(ReachableDb::Parse(spec, "spec_hash=0000000000000000\n"),
               SpecMismatchError);
  EXPECT_THROW(ReachableDb::Parse(spec, "anchor=0,0 complete=1\n"), ParseError);
  EXPECT_THROW(ReachableDb::Parse(spec, head + "0,0\n"), ParseError);
  EXPECT_THROW(ReachableDb::Parse(spec, head + "anchor=0,0 complete=2\n0,0\n"),
               ParseError);
  EXPECT_THROW(ReachableDb::Parse(spec, head + "anchor=0,0 complete=1\n0,0,0\n"),
               ParseError);
  // (0,1) is not reachable from (1,1).
  EXPECT_THROW(ReachableDb::Parse(spec, head + "anchor=1,1 complete=1\n1,1\n0,1\n"),
               ValidationError);
  // Anchor missing from its own list.
  EXPECT_THROW(ReachableDb::Parse(spec, head + "anchor=0,0 complete=0\n1,0\n"),
               ValidationError);
}

TEST(ReachableDbTest, ErrorsNameThePoint) {
  ActionSet spec = Fig1Spec();
  try {
    ReachableDb::Build(spec, std::vector<Point>{{0, 0}, {0, 1}, {3, 0}});
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("point 2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(ReachableDb(spec).At({0, 0}), DomainError);
}

}  // namespace
}  // namespace reach
