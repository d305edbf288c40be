#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "rankest/error.hpp"

namespace rankest {

// Hard caps on problem size. Estimators keep dense N-vectors and N x n
// conditional matrices.
inline constexpr int kMaxItems = 1'000'000;
inline constexpr int kMaxSampleSize = 10'000;
inline constexpr double kMaxConditionalCells = 5e8;

inline constexpr double kPmfSumTolerance = 1e-9;

enum class MetricKind { kRecall, kNdcg, kAp };

std::string_view MetricKindName(MetricKind kind);
MetricKind ParseMetricKind(std::string_view name);

// Metric kind plus cutoff K.
class MetricSpec {
 public:
  MetricSpec(MetricKind kind, int cutoff);

  MetricKind kind() const { return kind_; }
  int cutoff() const { return cutoff_; }

  bool operator==(const MetricSpec&) const = default;

 private:
  MetricKind kind_;
  int cutoff_;
};

enum class SamplingScheme { kWithReplacement, kWithoutReplacement };

std::string_view SamplingSchemeName(SamplingScheme scheme);
// Accepts "with"/"without" (CLI spelling) as well as the long names.
SamplingScheme ParseSamplingScheme(std::string_view name);

// Probability mass function over global ranks 1..N.
class RankPmf {
 public:
  // Normalizes a nonnegative, not-all-zero weight vector.
  static RankPmf FromWeights(std::vector<double> weights);
  // Takes probabilities that already sum to 1 (within kPmfSumTolerance).
  static RankPmf FromProbabilities(std::vector<double> probs);
  static RankPmf Uniform(int n_items);
  static RankPmf PointMass(int n_items, int rank);

  int n_items() const { return static_cast<int>(probs_.size()); }
  // 1-based.
  double operator()(int rank) const { return probs_[static_cast<std::size_t>(rank - 1)]; }
  std::span<const double> probs() const { return probs_; }

  bool operator==(const RankPmf&) const = default;

 private:
  explicit RankPmf(std::vector<double> probs) : probs_(std::move(probs)) {}

  std::vector<double> probs_;
};

// True ranks R_u of each user's target item among all N items.
class GlobalRankSet {
 public:
  GlobalRankSet(int n_items, std::vector<int> ranks);

  int n_items() const { return n_items_; }
  std::size_t size() const { return ranks_.size(); }
  std::span<const int> ranks() const { return ranks_; }

  bool operator==(const GlobalRankSet&) const = default;

 private:
  int n_items_;
  std::vector<int> ranks_;
};

struct SampledObservation {
  int rank;         // r_u
  int sample_size;  // n_u

  bool operator==(const SampledObservation&) const = default;
};

// Observed ranks r_u within per-user samples of size n_u.
class SampledRankSet {
 public:
  SampledRankSet(int n_items, std::vector<SampledObservation> observations);
  // Fixed-size convenience: every observation gets sample_size.
  static SampledRankSet Fixed(int n_items, int sample_size, std::span<const int> ranks);

  int n_items() const { return n_items_; }
  std::size_t size() const { return observations_.size(); }
  std::span<const SampledObservation> observations() const { return observations_; }

  bool is_fixed_size() const;
  // Common sample size; throws kMismatchedConfig when sizes vary.
  int sample_size() const;
  // Empirical sampled-rank distribution P~(r), r = 1..n (fixed-size only).
  std::vector<double> RankFrequencies() const;

  bool operator==(const SampledRankSet&) const = default;

 private:
  int n_items_;
  std::vector<SampledObservation> observations_;
};

// Throw kRankOutOfRange / kEmptySet / kInvalidObservation on violation.
void ValidateRanks(int n_items, std::span<const int> ranks);
void ValidateObservations(int n_items, std::span<const SampledObservation> observations);

}  // namespace rankest
