#include <gtest/gtest.h>

#include "reach/action_set_io.h"
#include "reach/reachable.h"
#include "test_util.h"

namespace reach {
namespace {

const std::string kDataDir = REACH_DATA_DIR;

constexpr const char* kFig1 = R"(
# two monotone binary features
[features]
name,type,lb,ub,actionable,sign
x1,binary,0,1,yes,+
x2,binary,0,1,yes,+
)";

TEST(ParseActionSet, Fig1) {
  ActionSet spec = ParseActionSet(kFig1);
  EXPECT_EQ(spec, testing::Fig1Spec());
}

TEST(ParseActionSet, ImmutableOnlyAllowsNull) {
  ActionSet spec = ParseActionSet("[features]\nage,integer,18,90,no,\n");
  EXPECT_EQ(spec.constraints().size(), 0u);
  for (Value a = -5; a <= 5; ++a) {
    EXPECT_EQ(spec.CheckAction(Point{40}, Action{a}), a == 0);
  }
}

TEST(ParseActionSet, AllConstraintKinds) {
  ActionSet spec = ParseActionSet(R"(
[features]
a,binary,0,1,yes,
b,binary,0,1,yes,
c,integer,0,5,yes,-
d,int,-2,2,no,free
e,bool,0,1,true,+
[constraints]
one_hot(features=[a, b], min=0, max=1)
thermometer(features=[a,b], direction=decrease)
linkage(source=c, targets=[d:1/2, e])
if_then(if=c, geq=2, then=e, value=1, on=action)
reachability(features=[a, e],
             values=[(0,0), (1,0), (1,1)],
             edges=[110, 011, 001])
)");
  ASSERT_EQ(spec.constraints().size(), 5u);
  EXPECT_EQ(spec.feature(2).sign, Sign::kNonPositive);
  auto& lk = std::get<DirectionalLinkage>(spec.constraints()[2]);
  EXPECT_EQ(lk.targets[0].scale, Rational(1, 2));
  EXPECT_EQ(lk.targets[1].scale, Rational(1));
  auto& it = std::get<IfThen>(spec.constraints()[3]);
  EXPECT_EQ(it.basis, ImplicationBasis::kAction);
  auto& rm = std::get<ReachabilityMatrix>(spec.constraints()[4]);
  EXPECT_EQ(rm.values.size(), 3u);
  EXPECT_TRUE(rm.edges[0][1]);
  EXPECT_FALSE(rm.edges[1][0]);
}

TEST(ParseActionSet, RoundTrip) {
  for (const auto& c : testing::RandomCorpus(100, 21)) {
    const std::string text = SerializeActionSet(c.spec);
    ActionSet again = ParseActionSet(text);
    ASSERT_EQ(again, c.spec) << text;
    EXPECT_EQ(SpecHash(again), SpecHash(c.spec));
  }
}

TEST(ParseActionSet, ErrorsCarryLocation) {
  try {
    ParseActionSet("[features]\nx,binary,0,1,maybe,\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_NE(std::string(e.what()).find("actionable"), std::string::npos);
  }
  try {
    ParseActionSet("[features]\nx,binary,0,1,yes,\n[constraints]\nfoo(a=1)\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4);
  }
  EXPECT_THROW(ParseActionSet("[features]\nx,binary,0,one,yes,\n"), ParseError);
  EXPECT_THROW(ParseActionSet("[features]\nx,binary,0,1,yes,\n[constraints]\n"
                              "one_hot(features=[x, y])\n"),
               ValidationError);
  EXPECT_THROW(ParseActionSet("[features]\nx,integer,5,1,yes,\n"),
               ValidationError);
  EXPECT_THROW(ParseActionSet("[features]\nx,binary,0,1,yes,\n[constraints]\n"
                              "reachability(features=[x], values=[(0),(1)], edges=[10,00])\n"),
               ValidationError);
  EXPECT_THROW(ParseActionSet("[features]\nx,binary,0,1,yes,\n[constraints]\n"
                              "reachability(features=[x], values=[(0),(1)], edges=[11])\n"),
               ValidationError);
}

TEST(ShippedSpecs, German) {
  ActionSet spec = LoadActionSet(kDataDir + "/action_sets/german.actions");
  EXPECT_EQ(spec.dimension(), 36u);
  ASSERT_EQ(spec.constraints().size(), 4u);
  int linkages = 0, thermometers = 0;
  for (const auto& c : spec.constraints()) {
    linkages += std::holds_alternative<DirectionalLinkage>(c);
    thermometers += std::holds_alternative<ThermometerEncoding>(c);
  }
  EXPECT_EQ(linkages, 2);
  EXPECT_EQ(thermometers, 2);
  EXPECT_EQ(ParseActionSet(SerializeActionSet(spec)), spec);
}

TEST(ShippedSpecs, GiveMeCreditIncomeDummiesShareAComponent) {
  ActionSet spec = LoadActionSet(kDataDir + "/action_sets/givemecredit.actions");
  EXPECT_EQ(spec.dimension(), 23u);
  auto a = *spec.FindFeature("MonthlyIncomeGeq3K");
  auto b = *spec.FindFeature("MonthlyIncomeGeq5K");
  auto c = *spec.FindFeature("MonthlyIncomeGeq10K");
  bool found = false;
  for (const auto& block : Partition(spec).blocks) {
    if (std::find(block.begin(), block.end(), a) == block.end()) continue;
    found = true;
    EXPECT_EQ(block, (std::vector<int>{a, b, c}));
  }
  EXPECT_TRUE(found);
}

TEST(ShippedSpecs, Heloc) {
  ActionSet spec = LoadActionSet(kDataDir + "/action_sets/heloc.actions");
  EXPECT_EQ(spec.dimension(), 43u);
  EXPECT_EQ(ParseActionSet(SerializeActionSet(spec)), spec);
}

}  // namespace
}  // namespace reach
