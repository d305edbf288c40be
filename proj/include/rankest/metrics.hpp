#pragma once

#include <vector>

#include "rankest/core_types.hpp"

namespace rankest {

// Top-K metric function F(rank), leave-one-out form:
//   Recall@K  delta(rank <= K)
//   NDCG@K    delta(rank <= K) / log2(rank + 1)
//   AP@K      delta(rank <= K) / rank
double MetricFn(const MetricSpec& spec, int rank);

// Mean of F(R_u) over users.
double GlobalMetric(const GlobalRankSet& ranks, const MetricSpec& spec);

// Mean of F(r_u) over users, evaluated on the sampled ranks.
double SampledMetric(const SampledRankSet& samples, const MetricSpec& spec);

// sum_R pmf(R) F(R).
double MetricFromPmf(const RankPmf& pmf, const MetricSpec& spec);

// P~(R) = #{u : R_u = R} / M.
RankPmf EmpiricalPmf(const GlobalRankSet& ranks);

// Element K-1 holds the metric at cutoff K, for K = 1..k_max.
std::vector<double> MetricCurve(const GlobalRankSet& ranks, MetricKind kind, int k_max);
std::vector<double> MetricCurve(const SampledRankSet& samples, MetricKind kind, int k_max);
std::vector<double> MetricCurve(const RankPmf& pmf, MetricKind kind, int k_max);
// Same prefix-sum curve for arbitrary (possibly signed) rank weights z_R:
// value at K is sum_{R <= K} z_R F_K(R).
std::vector<double> MetricCurveFromWeights(std::span<const double> weights, MetricKind kind, int k_max);

struct RelativeErrorSummary {
  double mean = 0.0;  // arithmetic mean of |estimate - truth| / truth
  int used = 0;       // number of K that contributed
  int skipped = 0;    // K where truth == 0
};

// Mean relative error over paired per-K values. Entries with truth == 0 are
// skipped and counted.
RelativeErrorSummary AverageRelativeError(const std::vector<double>& estimate,
                                          const std::vector<double>& truth);

}  // namespace rankest
