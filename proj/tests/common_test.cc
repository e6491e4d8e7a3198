#include <gtest/gtest.h>

#include <filesystem>

#include "reach/common.h"
#include "reach/rational.h"

namespace reach {
namespace {

TEST(Rational, ParsesIntegersDecimalsAndFractions) {
  EXPECT_EQ(Rational::Parse("3"), Rational(3));
  EXPECT_EQ(Rational::Parse("-0.25"), Rational(-1, 4));
  EXPECT_EQ(Rational::Parse("1/3"), Rational(1, 3));
  EXPECT_EQ(Rational::Parse("2.5e-1"), Rational(1, 4));
  EXPECT_EQ(Rational(2, -4), Rational(-1, 2));
}

TEST(Rational, RejectsGarbage) {
  EXPECT_THROW(Rational::Parse("abc"), ParseError);
  EXPECT_THROW(Rational::Parse("1/0"), ParseError);
  EXPECT_THROW(Rational::Parse(""), ParseError);
}

TEST(Rational, ScaleTruncatesTowardZero) {
  EXPECT_EQ(Rational(1, 2).ScaleTruncate(3), 1);
  EXPECT_EQ(Rational(1, 2).ScaleTruncate(-3), -1);
  EXPECT_EQ(Rational(-3).ScaleTruncate(2), -6);
}

TEST(Rational, OrdersByValue) {
  EXPECT_LT(Rational(1, 3), Rational(1, 2));
  EXPECT_LT(Rational(-1, 2), Rational(0));
  EXPECT_EQ(Rational(3, 4).ToString(), "3/4");
  EXPECT_EQ(Rational(-5).ToString(), "-5");
}

TEST(Points, FormatAndParseRoundTrip) {
  Point p{3, -1, 0, 42};
  EXPECT_EQ(FormatPoint(p), "3,-1,0,42");
  EXPECT_EQ(ParsePoint("3, -1,0 ,42"), p);
  EXPECT_EQ(ParsePoint(FormatPoint(p, ' '), ' '), p);
  EXPECT_THROW(ParsePoint("1,x"), ParseError);
  EXPECT_THROW(ParsePoint("1,,2"), ParseError);
}

TEST(Points, Norms) {
  EXPECT_EQ(L1Norm(Point{1, -2, 3}), 6);
  EXPECT_EQ(L1Distance(Point{1, 1}, Point{0, 3}), 3);
  EXPECT_EQ(Apply(Point{1, 1}, Action{-1, 2}), (Point{0, 3}));
  EXPECT_EQ(Difference(Point{0, 3}, Point{1, 1}), (Action{-1, 2}));
}

TEST(ParseErrorTest, MessageCarriesLocation) {
  ParseError e("bad value", 7, "lb");
  EXPECT_STREQ(e.what(), "line 7, lb: bad value");
  EXPECT_EQ(e.line(), 7);
  EXPECT_EQ(e.field(), "lb");
}

TEST(Files, AtomicWriteReplacesContents) {
  auto dir = std::filesystem::temp_directory_path() / "reach_common_test";
  std::filesystem::create_directories(dir);
  auto path = dir / "f.txt";
  WriteFileAtomic(path, "one");
  WriteFileAtomic(path, "two\n");
  EXPECT_EQ(ReadFile(path), "two\n");
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    EXPECT_EQ(entry.path().filename(), "f.txt");
  }
  EXPECT_THROW(ReadFile(dir / "missing"), IoError);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace reach
