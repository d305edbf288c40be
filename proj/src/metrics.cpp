#include "rankest/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rankest {

double MetricFn(const MetricSpec& spec, int rank) {
  if (rank < 1) throw Error(ErrorCode::kRankOutOfRange, "metric rank must be >= 1");
  if (rank > spec.cutoff()) return 0.0;
  switch (spec.kind()) {
    case MetricKind::kRecall: return 1.0;
    case MetricKind::kNdcg: return 1.0 / std::log2(static_cast<double>(rank) + 1.0);
    case MetricKind::kAp: return 1.0 / static_cast<double>(rank);
  }
  return 0.0;
}

double GlobalMetric(const GlobalRankSet& ranks, const MetricSpec& spec) {
  double total = 0.0;
  for (int r : ranks.ranks()) total += MetricFn(spec, r);
  return total / static_cast<double>(ranks.size());
}

double SampledMetric(const SampledRankSet& samples, const MetricSpec& spec) {
  double total = 0.0;
  for (const auto& o : samples.observations()) total += MetricFn(spec, o.rank);
  return total / static_cast<double>(samples.size());
}

double MetricFromPmf(const RankPmf& pmf, const MetricSpec& spec) {
  double total = 0.0;
  const int top = std::min(spec.cutoff(), pmf.n_items());
  for (int r = 1; r <= top; ++r) total += pmf(r) * MetricFn(spec, r);
  return total;
}

RankPmf EmpiricalPmf(const GlobalRankSet& ranks) {
  std::vector<double> counts(static_cast<std::size_t>(ranks.n_items()), 0.0);
  for (int r : ranks.ranks()) counts[static_cast<std::size_t>(r - 1)] += 1.0;
  return RankPmf::FromWeights(std::move(counts));
}

namespace {

void CheckKMax(int k_max) {
  if (k_max < 1) throw Error(ErrorCode::kInvalidArgument, "k_max must be >= 1");
}

// Curve from rank weights weights[r-1]. Values at
// each K are accumulated as a prefix sum of weight * F(r) with F evaluated at
// an unbounded cutoff, which equals the single-K metric.
std::vector<double> CurveFromHistogram(std::span<const double> weights, MetricKind kind, int k_max) {
  std::vector<double> curve(static_cast<std::size_t>(k_max), 0.0);
  const MetricSpec unbounded(kind, std::max<int>(k_max, static_cast<int>(weights.size())));
  double running = 0.0;
  for (int k = 1; k <= k_max; ++k) {
    if (k <= static_cast<int>(weights.size())) {
      running += weights[static_cast<std::size_t>(k - 1)] * MetricFn(unbounded, k);
    }
    curve[static_cast<std::size_t>(k - 1)] = running;
  }
  return curve;
}

}  // namespace

std::vector<double> MetricCurve(const GlobalRankSet& ranks, MetricKind kind, int k_max) {
  CheckKMax(k_max);
  const auto pmf = EmpiricalPmf(ranks);
  return CurveFromHistogram(pmf.probs(), kind, k_max);
}

std::vector<double> MetricCurve(const SampledRankSet& samples, MetricKind kind, int k_max) {
  CheckKMax(k_max);
  int n_max = 0;
  for (const auto& o : samples.observations()) n_max = std::max(n_max, o.rank);
  std::vector<double> hist(static_cast<std::size_t>(n_max), 0.0);
  for (const auto& o : samples.observations()) hist[static_cast<std::size_t>(o.rank - 1)] += 1.0;
  for (double& h : hist) h /= static_cast<double>(samples.size());
  return CurveFromHistogram(hist, kind, k_max);
}

std::vector<double> MetricCurve(const RankPmf& pmf, MetricKind kind, int k_max) {
  CheckKMax(k_max);
  return CurveFromHistogram(pmf.probs(), kind, k_max);
}

std::vector<double> MetricCurveFromWeights(std::span<const double> weights, MetricKind kind, int k_max) {
  CheckKMax(k_max);
  if (weights.empty()) throw Error(ErrorCode::kEmptySet, "rank weights are empty");
  return CurveFromHistogram(weights, kind, k_max);
}

RelativeErrorSummary AverageRelativeError(const std::vector<double>& estimate,
                                          const std::vector<double>& truth) {
  if (estimate.size() != truth.size()) {
    throw Error(ErrorCode::kSizeMismatch, "estimate and truth curves differ in length");
  }
  RelativeErrorSummary summary;
  double total = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == 0.0) {
      ++summary.skipped;
      continue;
    }
    total += std::abs(estimate[i] - truth[i]) / truth[i];
    ++summary.used;
  }
  summary.mean = summary.used > 0 ? total / summary.used : 0.0;
  return summary;
}

}  // namespace rankest
