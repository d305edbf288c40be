#pragma once

#include <cstdint>

#include "rankest/core_types.hpp"

namespace rankest {

// Two-sided confidence level and its critical value z_{alpha/2}.
class ConfidenceSpec {
 public:
  // z from the normal quantile at 1 - (1 - level)/2.
  static ConfidenceSpec At(double level);
  // Explicit critical value, e.g. the textbook 1.96 for 95%.
  static ConfidenceSpec WithCriticalValue(double level, double z);

  double level() const { return level_; }
  double z() const { return z_; }

 private:
  ConfidenceSpec(double level, double z) : level_(level), z_(z) {}

  double level_;
  double z_;
};

double NormalCdf(double x);
// Inverse standard normal CDF for p in (0, 1).
double NormalQuantile(double p);

// Metric over m users drawn uniformly without replacement.
double UserSampledMetric(const GlobalRankSet& ranks, std::size_t m, std::uint64_t seed, const MetricSpec& spec);

// p (1 - p) (z / e)^2, rounded to the nearest integer and at least 1.
long long MoeSampleSize(double p, double e, const ConfidenceSpec& conf);

// 2 exp(-2 m t^2).
double HoeffdingProb(double m, double t);

struct ZTestResult {
  double z = 0.0;
  // Pr(Z <= z): one-sided p-value against p1 >= p2.
  double p_value = 0.5;
};

// z = (p1 - p2) / sqrt(2 pbar qbar / m) with pooled pbar = (p1 + p2) / 2.
ZTestResult TwoProportionZ(double p1, double p2, double m);

// 2 p_m (1 - p_m) (z / e)^2 at p_m = 0.5, rounded to nearest, at least 1.
long long TwoModelSampleSize(double e, const ConfidenceSpec& conf);

double Bonferroni(double alpha, int n_comparisons);

}  // namespace rankest
