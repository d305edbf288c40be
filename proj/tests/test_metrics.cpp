#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "rankest/metrics.hpp"

namespace rankest {
namespace {

TEST(MetricFn, Examples) {
  EXPECT_DOUBLE_EQ(MetricFn({MetricKind::kRecall, 5}, 3), 1.0);
  EXPECT_DOUBLE_EQ(MetricFn({MetricKind::kNdcg, 5}, 1), 1.0);
  EXPECT_DOUBLE_EQ(MetricFn({MetricKind::kAp, 5}, 4), 0.25);
  EXPECT_DOUBLE_EQ(MetricFn({MetricKind::kNdcg, 5}, 6), 0.0);
  EXPECT_DOUBLE_EQ(MetricFn({MetricKind::kNdcg, 5}, 3), 0.5);
}

TEST(GlobalMetric, Examples) {
  EXPECT_DOUBLE_EQ(GlobalMetric(GlobalRankSet(10, {1, 3, 10}), {MetricKind::kRecall, 5}), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(GlobalMetric(GlobalRankSet(10, {1, 3}), {MetricKind::kNdcg, 5}), 0.75);
  EXPECT_DOUBLE_EQ(GlobalMetric(GlobalRankSet(10, {2, 2, 2}), {MetricKind::kAp, 1}), 0.0);
}

TEST(SampledMetric, Examples) {
  const std::vector<int> r = {1, 1, 2};
  EXPECT_DOUBLE_EQ(SampledMetric(SampledRankSet::Fixed(100, 10, r), {MetricKind::kRecall, 1}), 2.0 / 3.0);
  const std::vector<int> one = {1};
  EXPECT_DOUBLE_EQ(SampledMetric(SampledRankSet::Fixed(100, 10, one), {MetricKind::kNdcg, 1}), 1.0);
  const std::vector<int> deep = {5, 9};
  EXPECT_DOUBLE_EQ(SampledMetric(SampledRankSet::Fixed(100, 10, deep), {MetricKind::kAp, 4}), 0.0);
}

TEST(MetricFromPmf, Examples) {
  EXPECT_NEAR(MetricFromPmf(RankPmf::Uniform(10), {MetricKind::kRecall, 5}), 0.5, 1e-15);
  EXPECT_DOUBLE_EQ(MetricFromPmf(RankPmf::PointMass(1000, 1), {MetricKind::kNdcg, 100}), 1.0);
}

TEST(MetricFromPmf, EmpiricalPmfReproducesGlobalMetric) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 40; ++trial) {
    const int n_items = 20 + trial;
    std::uniform_int_distribution<int> rank(1, n_items);
    std::vector<int> ranks(1 + trial * 3);
    for (int& r : ranks) r = rank(gen);
    const GlobalRankSet set(n_items, ranks);
    const auto pmf = EmpiricalPmf(set);
    for (auto kind : {MetricKind::kRecall, MetricKind::kNdcg, MetricKind::kAp}) {
      for (int k : {1, 3, 10, n_items}) {
        const MetricSpec spec(kind, k);
        EXPECT_NEAR(MetricFromPmf(pmf, spec), GlobalMetric(set, spec), 1e-14);
      }
    }
  }
}

TEST(EmpiricalPmf, Examples) {
  const auto pmf = EmpiricalPmf(GlobalRankSet(3, {1, 1, 2}));
  EXPECT_DOUBLE_EQ(pmf(1), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(pmf(2), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(pmf(3), 0.0);
  EXPECT_EQ(EmpiricalPmf(GlobalRankSet(5, {5})), RankPmf::PointMass(5, 5));
}

TEST(MetricCurve, RecallExample) {
  const auto curve = MetricCurve(GlobalRankSet(4, {2, 4}), MetricKind::kRecall, 4);
  EXPECT_EQ(curve, (std::vector<double>{0.0, 0.5, 0.5, 1.0}));
}

TEST(MetricCurve, MatchesSingleKAndEndsAtOne) {
  std::mt19937_64 gen(9);
  std::uniform_int_distribution<int> rank(1, 60);
  std::vector<int> ranks(300);
  for (int& r : ranks) r = rank(gen);
  const GlobalRankSet set(60, ranks);
  const auto pmf = EmpiricalPmf(set);
  for (auto kind : {MetricKind::kRecall, MetricKind::kNdcg, MetricKind::kAp}) {
    const auto from_set = MetricCurve(set, kind, 60);
    const auto from_pmf = MetricCurve(pmf, kind, 60);
    for (int k = 1; k <= 60; ++k) {
      EXPECT_NEAR(from_set[k - 1], GlobalMetric(set, {kind, k}), 1e-12);
      EXPECT_NEAR(from_pmf[k - 1], MetricFromPmf(pmf, {kind, k}), 1e-12);
      EXPECT_GE(from_set[k - 1], 0.0);
      EXPECT_LE(from_set[k - 1], 1.0 + 1e-12);
      if (kind == MetricKind::kRecall && k > 1) EXPECT_GE(from_set[k - 1], from_set[k - 2]);
    }
    if (kind == MetricKind::kRecall) EXPECT_NEAR(from_set.back(), 1.0, 1e-12);
  }
}

TEST(MetricCurve, SampledSetMatchesSampledMetric) {
  const std::vector<int> r = {1, 2, 2, 7, 10};
  const auto s = SampledRankSet::Fixed(100, 10, r);
  const auto curve = MetricCurve(s, MetricKind::kNdcg, 12);
  for (int k = 1; k <= 12; ++k) EXPECT_NEAR(curve[k - 1], SampledMetric(s, {MetricKind::kNdcg, k}), 1e-15);
}

TEST(AverageRelativeError, SkipsZeroTruth) {
  const auto s = AverageRelativeError({0.1, 0.2, 0.33}, {0.0, 0.25, 0.3});
  EXPECT_EQ(s.skipped, 1);
  EXPECT_EQ(s.used, 2);
  EXPECT_NEAR(s.mean, (0.2 + 0.1) / 2.0, 1e-12);
}

TEST(AverageRelativeError, RejectsLengthMismatch) {
  EXPECT_THROW(AverageRelativeError({0.1}, {0.1, 0.2}), Error);
}

}  // namespace
}  // namespace rankest
