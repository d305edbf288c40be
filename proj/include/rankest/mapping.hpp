#pragma once

#include <string_view>
#include <vector>

#include "rankest/core_types.hpp"

namespace rankest {

enum class MappingKind { kBaseline, kBoundary, kBetaRecurrence, kLinear };

std::string_view MappingKindName(MappingKind kind);
// "baseline", "boundary", "beta", "linear".
MappingKind ParseMappingKind(std::string_view name);

// Maps a sampled cutoff k in [1, n] to a global cutoff f(k) in [1, N].
struct MappingSpec {
  MappingKind kind = MappingKind::kBoundary;
  int n_items = 0;
  int sample_size = 0;
  double a = 1.0;  // Beta shape; BetaRecurrence only

  void Validate() const;
};

// Real-valued f(1..n) before rounding and clamping.
//   Baseline  (k-1)(N-1)/(n-1) + 1
//   Boundary  (k-1/2)(N-1)/(n-1) + 1/2
//   Linear    k(N-1)/n + 1
//   Beta      f(k) = (N-1) S_k^(1/a) + 1 with S_1 = a B(a, n) and
//             S_{k+1} = S_k + a C(n-1, k) B(a+k, n-k)
std::vector<double> MapValues(const MappingSpec& spec);

// Integer f(k): floor for Boundary, nearest for the others; clamped to [1, N].
int MapK(const MappingSpec& spec, int k);
std::vector<int> MapCurve(const MappingSpec& spec);

struct AlignmentError {
  std::vector<double> per_k;  // |T^S_Recall@k - T_Recall@f(k)| for k = k_lo..k_hi
  double mean = 0.0;
};

// Samples must be fixed-size with n and N matching `spec`.
AlignmentError AlignError(const GlobalRankSet& global, const SampledRankSet& samples, const MappingSpec& spec,
                          int k_lo, int k_hi);

// |f(k; a) - f(k; 1)| / f(k; 1) for k = 1..n.
std::vector<double> BetaRelativeGap(double a, int n_items, int sample_size);

// Grid search over a in {0.1, 0.2, ..., 1.0} minimizing the squared distance
// between the discretized Beta(a, 1) pmf and the empirical pmf.
double FitBetaShape(const RankPmf& empirical);

}  // namespace rankest
