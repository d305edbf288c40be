#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "rankest/metrics.hpp"
#include "rankest/population.hpp"
#include "rankest/user_sampling.hpp"

namespace rankest {
namespace {

// Reference values computed with 30-digit arithmetic.
constexpr double kZ975 = 1.959963984540054235524594;
constexpr double kZ9995 = 3.0902323061678135415404;  // quantile at 0.999

TEST(NormalQuantile, MatchesReferenceValues) {
  EXPECT_NEAR(NormalQuantile(0.975), kZ975, 1e-12);
  EXPECT_NEAR(NormalQuantile(0.999), kZ9995, 1e-12);
  EXPECT_NEAR(NormalQuantile(0.5), 0.0, 1e-15);
  EXPECT_NEAR(NormalQuantile(0.025), -kZ975, 1e-12);
  EXPECT_THROW(NormalQuantile(0.0), Error);
  EXPECT_THROW(NormalQuantile(1.0), Error);
}

TEST(NormalQuantile, InvertsCdfAcrossRange) {
  for (double p = 1e-8; p < 1.0; p = p < 0.01 ? p * 10.0 : p + 0.01) {
    EXPECT_NEAR(NormalCdf(NormalQuantile(p)), p, 1e-12 * std::max(1.0, p / (1.0 - p)) + 1e-15) << p;
  }
}

TEST(ConfidenceSpec, CriticalValues) {
  EXPECT_NEAR(ConfidenceSpec::At(0.95).z(), kZ975, 1e-12);
  EXPECT_DOUBLE_EQ(ConfidenceSpec::WithCriticalValue(0.95, 1.96).z(), 1.96);
  EXPECT_THROW(ConfidenceSpec::At(1.0), Error);
  EXPECT_THROW(ConfidenceSpec::WithCriticalValue(0.95, 0.0), Error);
}

TEST(MoeSampleSize, ReferenceExamples) {
  const auto conf = ConfidenceSpec::At(0.95);
  EXPECT_EQ(MoeSampleSize(0.5, 0.03, conf), 1067);
  EXPECT_EQ(MoeSampleSize(0.5, 0.01, conf), 9604);
}

TEST(MoeSampleSize, MonotoneInMarginAndConfidence) {
  long long prev = std::numeric_limits<long long>::max();
  for (double e = 0.005; e < 0.2; e += 0.005) {
    const long long m = MoeSampleSize(0.5, e, ConfidenceSpec::At(0.95));
    EXPECT_LE(m, prev);
    prev = m;
  }
  EXPECT_LT(MoeSampleSize(0.5, 0.03, ConfidenceSpec::At(0.9)), MoeSampleSize(0.5, 0.03, ConfidenceSpec::At(0.99)));
  EXPECT_LT(MoeSampleSize(0.1, 0.03, ConfidenceSpec::At(0.95)), MoeSampleSize(0.5, 0.03, ConfidenceSpec::At(0.95)));
  EXPECT_EQ(MoeSampleSize(0.5, 10.0, ConfidenceSpec::At(0.95)), 1);
  EXPECT_THROW(MoeSampleSize(0.0, 0.03, ConfidenceSpec::At(0.95)), Error);
  EXPECT_THROW(MoeSampleSize(0.5, -0.03, ConfidenceSpec::At(0.95)), Error);
}

TEST(TwoModelSampleSize, ReferenceExamples) {
  EXPECT_EQ(TwoModelSampleSize(0.03, ConfidenceSpec::At(0.95)), 2134);
  EXPECT_EQ(TwoModelSampleSize(0.01, ConfidenceSpec::WithCriticalValue(0.95, 1.96)), 19208);
}

TEST(HoeffdingProb, ReferenceValues) {
  EXPECT_NEAR(HoeffdingProb(10000, 0.02), 0.00067092525580502367764, 1e-17);
  EXPECT_NEAR(HoeffdingProb(30000, 0.01), 0.0049575043533327168461, 1e-16);
  EXPECT_LT(HoeffdingProb(10000, 0.02), 1e-3);
  EXPECT_LE(HoeffdingProb(30000, 0.01), 0.005);
  EXPECT_THROW(HoeffdingProb(0.5, 0.01), Error);
}

TEST(TwoProportionZ, ReferenceValue) {
  const auto r = TwoProportionZ(0.45, 0.40, 10000);
  EXPECT_NEAR(r.z, 7.151985398521515552495586, 1e-12);
  EXPECT_NEAR(r.p_value, 0.999999999999572341655251, 1e-15);
}

TEST(TwoProportionZ, EqualProportions) {
  const auto r = TwoProportionZ(0.3, 0.3, 500);
  EXPECT_DOUBLE_EQ(r.z, 0.0);
  EXPECT_DOUBLE_EQ(r.p_value, 0.5);
  EXPECT_LT(TwoProportionZ(0.2, 0.3, 500).z, 0.0);
}

TEST(TwoProportionZ, DegeneratePool) {
  for (double p : {0.0, 1.0}) {
    try {
      TwoProportionZ(p, p, 100);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kDegeneratePool);
    }
  }
}

TEST(Bonferroni, Divides) {
  EXPECT_DOUBLE_EQ(Bonferroni(0.05, 5), 0.01);
  EXPECT_DOUBLE_EQ(Bonferroni(0.05, 1), 0.05);
  EXPECT_THROW(Bonferroni(0.05, 0), Error);
}

GlobalRankSet HalfHitPopulation(std::size_t m) {
  std::vector<int> ranks(m);
  for (std::size_t i = 0; i < m; ++i) ranks[i] = i % 2 == 0 ? 1 : 50;
  return GlobalRankSet(100, std::move(ranks));
}

TEST(UserSampledMetric, FullSubsetIsExact) {
  const auto pop = DrawPopulation(SynthRankPmf(0.5, 500), 4000, 3);
  for (auto kind : {MetricKind::kRecall, MetricKind::kNdcg, MetricKind::kAp}) {
    const MetricSpec spec(kind, 10);
    EXPECT_NEAR(UserSampledMetric(pop, pop.size(), 9, spec), GlobalMetric(pop, spec), 1e-12);
  }
}

TEST(UserSampledMetric, SubsetSizeBounds) {
  const auto pop = HalfHitPopulation(10);
  for (std::size_t m : {std::size_t{0}, std::size_t{11}}) {
    try {
      UserSampledMetric(pop, m, 1, {MetricKind::kRecall, 5});
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidSubsetSize);
    }
  }
}

TEST(UserSampledMetric, DeterministicPerSeed) {
  const auto pop = DrawPopulation(SynthRankPmf(0.5, 500), 4000, 3);
  const MetricSpec spec(MetricKind::kNdcg, 20);
  EXPECT_EQ(UserSampledMetric(pop, 300, 5, spec), UserSampledMetric(pop, 300, 5, spec));
  EXPECT_NE(UserSampledMetric(pop, 300, 5, spec), UserSampledMetric(pop, 300, 6, spec));
}

TEST(UserSampledMetric, UnbiasedOverSeeds) {
  const auto pop = DrawPopulation(SynthRankPmf(0.5, 1000), 20000, 4);
  const MetricSpec spec(MetricKind::kRecall, 30);
  const double truth = GlobalMetric(pop, spec);
  constexpr int kSeeds = 200;
  std::vector<double> vals;
  for (int s = 0; s < kSeeds; ++s) vals.push_back(UserSampledMetric(pop, 1000, s, spec));
  const double mean = std::accumulate(vals.begin(), vals.end(), 0.0) / kSeeds;
  double ss = 0.0;
  for (double v : vals) ss += (v - mean) * (v - mean);
  EXPECT_LE(std::abs(mean - truth), 4.0 * std::sqrt(ss / (kSeeds - 1) / kSeeds));
}

TEST(UserSampledMetric, MarginOfErrorCoverage) {
  const auto pop = HalfHitPopulation(20000);
  const MetricSpec spec(MetricKind::kRecall, 10);
  const auto m = static_cast<std::size_t>(MoeSampleSize(0.5, 0.03, ConfidenceSpec::At(0.95)));
  int covered = 0;
  constexpr int kSeeds = 300;
  for (int s = 0; s < kSeeds; ++s) covered += std::abs(UserSampledMetric(pop, m, s, spec) - 0.5) <= 0.03;
  EXPECT_GE(covered, static_cast<int>(0.92 * kSeeds));
}

}  // namespace
}  // namespace rankest
