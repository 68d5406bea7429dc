#include <algorithm>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "chartlink/metrics.h"
#include "oracles/metrics_oracle.h"

namespace chartlink {
namespace {

using namespace chartlink::testing;

TEST(F1, WorkedValues) {
  EXPECT_NEAR(F1(0.65, 0.47), 0.5455357, 1e-6);
  EXPECT_NEAR(F1(1, 0.5), 2.0 / 3.0, 1e-12);
  EXPECT_EQ(F1(0, 0), 0);
  EXPECT_EQ(F1(1, 1), 1);
}

TEST(PhraseSimilarity, IntervalArithmetic) {
  EXPECT_DOUBLE_EQ(PhraseSimilarity({0, 10}, {5, 15}), 5.0 / 15.0);
  EXPECT_DOUBLE_EQ(PhraseSimilarity({3, 9}, {3, 9}), 1);
  EXPECT_DOUBLE_EQ(PhraseSimilarity({0, 4}, {4, 8}), 0);
}

TEST(ElementSetF1, Examples) {
  EXPECT_NEAR(ElementSetF1({"a"}, {"a", "b"}), 2.0 / 3.0, 1e-12);
  EXPECT_EQ(ElementSetF1({"a", "b"}, {"b", "a"}), 1);
  EXPECT_EQ(ElementSetF1({"a"}, {"b"}), 0);
  EXPECT_EQ(ElementSetF1({}, {}), 1);
}

TEST(PhraseSetF1, ExtraDisjointSpan) {
  EXPECT_NEAR(PhraseSetF1({{0, 5}, {20, 25}}, {{0, 5}}), 2.0 / 3.0, 1e-12);
  EXPECT_EQ(PhraseSetF1({{0, 5}}, {{10, 12}}), 0);
}

TEST(GroupSimilarity, MeanOfSubScores) {
  ScoredGroup pred{{"a"}, {{0, 5}, {20, 25}}};
  ScoredGroup gold{{"a", "b"}, {{0, 5}}};
  EXPECT_NEAR(GroupSimilarity(pred, gold), (2.0 / 3.0 + 2.0 / 3.0) / 2, 1e-12);
  ScoredGroup other{{"z"}, {{40, 44}}};
  EXPECT_EQ(GroupSimilarity(pred, other), 0);
}

TEST(CaseScore, EmptyConventions) {
  ScoredGroup g{{"a"}, {{0, 3}}};
  Score both = CaseScore({}, {});
  EXPECT_EQ(both.f1, 1);
  Score none = CaseScore({}, {g});
  EXPECT_EQ(none.precision, 0);
  EXPECT_EQ(none.recall, 0);
  EXPECT_EQ(none.f1, 0);
}

TEST(CaseScore, MatchesBruteForceOracle) {
  std::mt19937 rng(20241);
  for (int trial = 0; trial < 2000; ++trial) {
    auto pred = RandomGroups(rng);
    auto gold = RandomGroups(rng);
    Score expected = oracle::CaseScore(pred, gold);
    Score got = CaseScore(ToScored(pred), ToScored(gold));
    ASSERT_NEAR(got.precision, expected.precision, 1e-9) << "trial " << trial;
    ASSERT_NEAR(got.recall, expected.recall, 1e-9) << "trial " << trial;
    ASSERT_NEAR(got.f1, expected.f1, 1e-9) << "trial " << trial;
  }
}

TEST(CaseScore, SwappingArgumentsSwapsPrecisionAndRecall) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    auto pred = ToScored(RandomGroups(rng, 1));
    auto gold = ToScored(RandomGroups(rng, 1));
    Score a = CaseScore(pred, gold);
    Score b = CaseScore(gold, pred);
    EXPECT_DOUBLE_EQ(a.precision, b.recall);
    EXPECT_DOUBLE_EQ(a.recall, b.precision);
    EXPECT_NEAR(a.f1, b.f1, 1e-12);
  }
}

TEST(CaseScore, InvariantUnderReordering) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    auto pred = ToScored(RandomGroups(rng, 1));
    auto gold = ToScored(RandomGroups(rng, 1));
    Score a = CaseScore(pred, gold);
    std::shuffle(pred.begin(), pred.end(), rng);
    std::shuffle(gold.begin(), gold.end(), rng);
    Score b = CaseScore(pred, gold);
    EXPECT_NEAR(a.precision, b.precision, 1e-12);
    EXPECT_NEAR(a.recall, b.recall, 1e-12);
  }
}

TEST(CaseScore, SelfSimilarityAndMonotonicity) {
  std::mt19937 rng(13);
  for (int trial = 0; trial < 300; ++trial) {
    auto gold = ToScored(RandomGroups(rng, 1));
    for (const ScoredGroup &g : gold) EXPECT_DOUBLE_EQ(GroupSimilarity(g, g), 1);
    Score self = CaseScore(gold, gold);
    EXPECT_DOUBLE_EQ(self.f1, 1);

    auto pred = ToScored(RandomGroups(rng, 1));
    Score before = CaseScore(pred, gold);
    pred.push_back(gold[trial % gold.size()]);
    Score after = CaseScore(pred, gold);
    EXPECT_GE(after.recall + 1e-12, before.recall);
    for (double v : {after.precision, after.recall, after.f1}) {
      EXPECT_GE(v, 0);
      EXPECT_LE(v, 1);
    }
  }
}

TEST(EvaluateCorpus, MeansAndSkips) {
  ScoredGroup g{{"a"}, {{0, 3}}};
  ScoredGroup h{{"b"}, {{5, 9}}};
  std::vector<CaseInput> cases = {
      {"one", "bar", {g}, std::vector<ScoredGroup>{g}},
      {"two", "line", {g}, std::vector<ScoredGroup>{h}},
      {"three", "line", {g}, std::nullopt},
  };
  EvalReport report = EvaluateCorpus(cases);
  ASSERT_EQ(report.cases.size(), 2u);
  EXPECT_DOUBLE_EQ(report.mean_f1, 0.5);
  EXPECT_EQ(report.skipped, std::vector<std::string>{"three"});
  EXPECT_FALSE(report.warnings.empty());
  EXPECT_DOUBLE_EQ(report.mean_f1_by_chart_type.at("bar"), 1.0);
  EXPECT_DOUBLE_EQ(report.mean_f1_by_chart_type.at("line"), 0.0);
  auto doc = ReportToJson(report);
  EXPECT_EQ(doc["cases"].size(), 2u);
  EXPECT_NE(ReportToTable(report).find("mean f1"), std::string::npos);
}

}  // namespace
}  // namespace chartlink
