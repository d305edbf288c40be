#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rankest/core_types.hpp"

namespace rankest {

// P(r | R; n, N). With replacement r - 1 ~ Binomial(n - 1, (R - 1)/(N - 1));
// without replacement r - 1 ~ Hypergeometric(N - 1 items, R - 1 better, n - 1 draws).
struct ConditionalRankModel {
  int n_items = 0;
  int sample_size = 0;
  SamplingScheme scheme = SamplingScheme::kWithReplacement;

  // n >= 2 always; n <= N only without replacement (binomial draws can
  // exceed the catalogue).
  void Validate() const;
};

double ConditionalLogProb(const ConditionalRankModel& model, int global_rank, int sampled_rank);
double ConditionalProb(const ConditionalRankModel& model, int global_rank, int sampled_rank);

// Row over r = 1..n for a fixed R.
std::vector<double> ConditionalPmf(const ConditionalRankModel& model, int global_rank);

// Column over R = 1..N for a fixed observed r: the likelihood of each global
// rank given (r, n).
std::vector<double> LikelihoodColumn(const ConditionalRankModel& model, int sampled_rank);

// Dense N x n table of P(r | R), row-major by R. Rejects N * n above
// kMaxConditionalCells.
class ConditionalMatrix {
 public:
  explicit ConditionalMatrix(const ConditionalRankModel& model);

  const ConditionalRankModel& model() const { return model_; }
  int rows() const { return model_.n_items; }
  int cols() const { return model_.sample_size; }
  // 1-based R and r.
  double operator()(int global_rank, int sampled_rank) const {
    return cells_[static_cast<std::size_t>(global_rank - 1) * static_cast<std::size_t>(cols()) +
                  static_cast<std::size_t>(sampled_rank - 1)];
  }
  const std::vector<double>& cells() const { return cells_; }

 private:
  ConditionalRankModel model_;
  std::vector<double> cells_;
};

// Draws r_u for every user from P(. | R_u). User u uses its own stream
// derived from (seed, u).
SampledRankSet SampleRanks(const GlobalRankSet& ranks, int sample_size, SamplingScheme scheme,
                           std::uint64_t seed);

struct SampledRecallMoments {
  double mean = 0.0;
  // sum_R P(R) p_R (1 - p_R) with p_R = Pr(r <= K | R); divide by M for Var[T^S].
  double per_user_variance = 0.0;

  double Variance(std::size_t n_users) const { return per_user_variance / static_cast<double>(n_users); }
};

SampledRecallMoments ExpectedSampledRecall(const RankPmf& pmf, int sample_size, int cutoff,
                                           SamplingScheme scheme);

// Expected sampled Recall@k for k = 1..n.
std::vector<double> ExpectedSampledRecallCurve(const RankPmf& pmf, int sample_size, SamplingScheme scheme);

struct AdaptiveConfig {
  int initial_size = 100;
  int terminal_size = 3200;
  SamplingScheme scheme = SamplingScheme::kWithoutReplacement;

  // n0 >= 2, n_max = n0 * 2^j; without replacement also n_max <= N.
  void Validate(int n_items) const;
  // n0, 2 n0, ..., n_max.
  std::vector<int> Sizes() const;
};

// Per user: start from n0 - 1 sampled items plus the target. While the target
// ranks first and n_u < n_max, draw n_u more items and re-rank against the
// whole cumulative sample. Without replacement, items are never repeated
// within a user.
SampledRankSet AdaptiveSample(const GlobalRankSet& ranks, const AdaptiveConfig& cfg, std::uint64_t seed);

struct CostProfile {
  std::vector<int> sizes;                    // n_j
  std::vector<std::size_t> user_counts;      // m_j, users whose final size is n_j
  std::vector<std::optional<double>> costs;  // C_j; empty where m_j = 0
};

// C_0 = M n0 / m_0, C_j = (M - sum_{p<j} m_p)(n_j - n_{j-1}) / m_j.
CostProfile ComputeCostProfile(const SampledRankSet& samples, const AdaptiveConfig& cfg);

}  // namespace rankest
