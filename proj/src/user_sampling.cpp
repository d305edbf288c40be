#include "rankest/user_sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "rankest/metrics.hpp"
#include "rankest/rng.hpp"

namespace rankest {

ConfidenceSpec ConfidenceSpec::At(double level) {
  if (!(level > 0.0 && level < 1.0)) throw Error(ErrorCode::kInvalidArgument, "confidence level must be in (0, 1)");
  return ConfidenceSpec(level, NormalQuantile(1.0 - (1.0 - level) / 2.0));
}

ConfidenceSpec ConfidenceSpec::WithCriticalValue(double level, double z) {
  if (!(level > 0.0 && level < 1.0)) throw Error(ErrorCode::kInvalidArgument, "confidence level must be in (0, 1)");
  if (!(z > 0.0)) throw Error(ErrorCode::kInvalidArgument, "critical value must be > 0");
  return ConfidenceSpec(level, z);
}

double NormalCdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double NormalQuantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::kInvalidArgument, "quantile needs p in (0, 1)");
  // Acklam's rational approximation, then one Halley step against erfc.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                 1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                 6.680131188771972e+01,  -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                 -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  double x = 0.0;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double e = NormalCdf(x) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
  return x - u / (1.0 + x * u / 2.0);
}

double UserSampledMetric(const GlobalRankSet& ranks, std::size_t m, std::uint64_t seed, const MetricSpec& spec) {
  if (m < 1 || m > ranks.size()) {
    throw Error(ErrorCode::kInvalidSubsetSize, "subset size " + std::to_string(m) + " outside [1, M=" +
                                                   std::to_string(ranks.size()) + "]");
  }
  std::vector<std::size_t> idx(ranks.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  auto rng = MakeStream(seed, StreamTag::kUserSubset, 0);
  // Partial Fisher-Yates: the first m slots become the subset.
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t span = idx.size() - i;
    const auto j = i + static_cast<std::size_t>(UniformUnit(rng) * static_cast<double>(span));
    std::swap(idx[i], idx[std::min(j, idx.size() - 1)]);
  }
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) total += MetricFn(spec, ranks.ranks()[idx[i]]);
  return total / static_cast<double>(m);
}

namespace {

long long RoundSize(double value) { return std::max(1LL, std::llround(value)); }

}  // namespace

long long MoeSampleSize(double p, double e, const ConfidenceSpec& conf) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::kInvalidArgument, "p must be in (0, 1)");
  if (!(e > 0.0)) throw Error(ErrorCode::kInvalidArgument, "margin of error must be > 0");
  const double ratio = conf.z() / e;
  return RoundSize(p * (1.0 - p) * ratio * ratio);
}

double HoeffdingProb(double m, double t) {
  if (!(m >= 1.0)) throw Error(ErrorCode::kInvalidArgument, "m must be >= 1");
  if (!(t > 0.0)) throw Error(ErrorCode::kInvalidArgument, "t must be > 0");
  return 2.0 * std::exp(-2.0 * m * t * t);
}

ZTestResult TwoProportionZ(double p1, double p2, double m) {
  if (!(m >= 1.0)) throw Error(ErrorCode::kInvalidArgument, "m must be >= 1");
  if (!(p1 >= 0.0 && p1 <= 1.0 && p2 >= 0.0 && p2 <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "proportions must be in [0, 1]");
  }
  const double pbar = (p1 + p2) / 2.0;
  if (pbar <= 0.0 || pbar >= 1.0) throw Error(ErrorCode::kDegeneratePool, "pooled proportion is 0 or 1");
  ZTestResult out;
  out.z = (p1 - p2) / std::sqrt(2.0 * pbar * (1.0 - pbar) / m);
  out.p_value = NormalCdf(out.z);
  return out;
}

long long TwoModelSampleSize(double e, const ConfidenceSpec& conf) {
  if (!(e > 0.0)) throw Error(ErrorCode::kInvalidArgument, "margin of error must be > 0");
  const double ratio = conf.z() / e;
  return RoundSize(2.0 * 0.25 * ratio * ratio);
}

double Bonferroni(double alpha, int n_comparisons) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::kInvalidArgument, "alpha must be in (0, 1)");
  if (n_comparisons < 1) throw Error(ErrorCode::kInvalidArgument, "number of comparisons must be >= 1");
  return alpha / n_comparisons;
}

}  // namespace rankest
