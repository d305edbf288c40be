#include "rankest/core_types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace rankest {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kRankOutOfRange: return "RankOutOfRange";
    case ErrorCode::kEmptySet: return "EmptySet";
    case ErrorCode::kInvalidObservation: return "InvalidObservation";
    case ErrorCode::kInvalidSampleSize: return "InvalidSampleSize";
    case ErrorCode::kMismatchedConfig: return "MismatchedConfig";
    case ErrorCode::kSizeMismatch: return "SizeMismatch";
    case ErrorCode::kDegenerateLikelihood: return "DegenerateLikelihood";
    case ErrorCode::kSingularSystem: return "SingularSystem";
    case ErrorCode::kInvalidSubsetSize: return "InvalidSubsetSize";
    case ErrorCode::kDegeneratePool: return "DegeneratePool";
    case ErrorCode::kMemoryGuard: return "MemoryGuard";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kParse: return "Parse";
  }
  return "Unknown";
}

std::string_view MetricKindName(MetricKind kind) {
  switch (kind) {
    case MetricKind::kRecall: return "recall";
    case MetricKind::kNdcg: return "ndcg";
    case MetricKind::kAp: return "ap";
  }
  return "unknown";
}

MetricKind ParseMetricKind(std::string_view name) {
  if (name == "recall" || name == "Recall") return MetricKind::kRecall;
  if (name == "ndcg" || name == "NDCG") return MetricKind::kNdcg;
  if (name == "ap" || name == "AP") return MetricKind::kAp;
  throw Error(ErrorCode::kParse, "unknown metric kind '" + std::string(name) + "'");
}

MetricSpec::MetricSpec(MetricKind kind, int cutoff) : kind_(kind), cutoff_(cutoff) {
  if (cutoff < 1) {
    throw Error(ErrorCode::kInvalidArgument, "metric cutoff must be >= 1, got " + std::to_string(cutoff));
  }
}

std::string_view SamplingSchemeName(SamplingScheme scheme) {
  return scheme == SamplingScheme::kWithReplacement ? "with" : "without";
}

SamplingScheme ParseSamplingScheme(std::string_view name) {
  if (name == "with" || name == "with_replacement") return SamplingScheme::kWithReplacement;
  if (name == "without" || name == "without_replacement") return SamplingScheme::kWithoutReplacement;
  throw Error(ErrorCode::kParse, "unknown sampling scheme '" + std::string(name) + "'");
}

// RankPmf

RankPmf RankPmf::FromWeights(std::vector<double> weights) {
  if (weights.empty()) throw Error(ErrorCode::kEmptySet, "pmf needs at least one rank");
  if (weights.size() > static_cast<std::size_t>(kMaxItems)) {
    throw Error(ErrorCode::kMemoryGuard, "pmf length exceeds item cap");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::kInvalidArgument, "pmf weights must be finite and nonnegative");
    }
    total += w;
  }
  if (total <= 0.0) throw Error(ErrorCode::kInvalidArgument, "pmf weights are all zero");
  for (double& w : weights) w /= total;
  return RankPmf(std::move(weights));
}

RankPmf RankPmf::FromProbabilities(std::vector<double> probs) {
  if (probs.empty()) throw Error(ErrorCode::kEmptySet, "pmf needs at least one rank");
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw Error(ErrorCode::kInvalidArgument, "pmf entries must be finite and nonnegative");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > kPmfSumTolerance) {
    throw Error(ErrorCode::kInvalidArgument, "pmf entries sum to " + std::to_string(total));
  }
  return RankPmf(std::move(probs));
}

RankPmf RankPmf::Uniform(int n_items) {
  if (n_items < 1) throw Error(ErrorCode::kInvalidArgument, "n_items must be >= 1");
  return FromWeights(std::vector<double>(static_cast<std::size_t>(n_items), 1.0));
}

RankPmf RankPmf::PointMass(int n_items, int rank) {
  if (n_items < 1) throw Error(ErrorCode::kInvalidArgument, "n_items must be >= 1");
  if (rank < 1 || rank > n_items) {
    throw Error(ErrorCode::kRankOutOfRange, "point mass rank " + std::to_string(rank));
  }
  std::vector<double> probs(static_cast<std::size_t>(n_items), 0.0);
  probs[static_cast<std::size_t>(rank - 1)] = 1.0;
  return RankPmf(std::move(probs));
}

// Rank sets

void ValidateRanks(int n_items, std::span<const int> ranks) {
  if (n_items < 1 || n_items > kMaxItems) {
    throw Error(ErrorCode::kInvalidArgument, "n_items out of range: " + std::to_string(n_items));
  }
  if (ranks.empty()) throw Error(ErrorCode::kEmptySet, "rank set has no users");
  for (std::size_t u = 0; u < ranks.size(); ++u) {
    if (ranks[u] < 1 || ranks[u] > n_items) {
      throw Error(ErrorCode::kRankOutOfRange,
                  "user " + std::to_string(u) + " has rank " + std::to_string(ranks[u]) +
                      " outside [1, " + std::to_string(n_items) + "]");
    }
  }
}

void ValidateObservations(int n_items, std::span<const SampledObservation> observations) {
  if (n_items < 1 || n_items > kMaxItems) {
    throw Error(ErrorCode::kInvalidArgument, "n_items out of range: " + std::to_string(n_items));
  }
  if (observations.empty()) throw Error(ErrorCode::kEmptySet, "sampled set has no users");
  for (std::size_t u = 0; u < observations.size(); ++u) {
    const auto& obs = observations[u];
    if (obs.sample_size < 1 || obs.sample_size > kMaxSampleSize) {
      throw Error(ErrorCode::kInvalidObservation,
                  "user " + std::to_string(u) + " has sample size " + std::to_string(obs.sample_size));
    }
    if (obs.rank < 1 || obs.rank > obs.sample_size) {
      throw Error(ErrorCode::kInvalidObservation,
                  "user " + std::to_string(u) + " has sampled rank " + std::to_string(obs.rank) +
                      " outside [1, " + std::to_string(obs.sample_size) + "]");
    }
  }
}

GlobalRankSet::GlobalRankSet(int n_items, std::vector<int> ranks)
    : n_items_(n_items), ranks_(std::move(ranks)) {
  ValidateRanks(n_items_, ranks_);
}

SampledRankSet::SampledRankSet(int n_items, std::vector<SampledObservation> observations)
    : n_items_(n_items), observations_(std::move(observations)) {
  ValidateObservations(n_items_, observations_);
}

SampledRankSet SampledRankSet::Fixed(int n_items, int sample_size, std::span<const int> ranks) {
  std::vector<SampledObservation> obs;
  obs.reserve(ranks.size());
  for (int r : ranks) obs.push_back({r, sample_size});
  return SampledRankSet(n_items, std::move(obs));
}

bool SampledRankSet::is_fixed_size() const {
  const int n = observations_.front().sample_size;
  return std::all_of(observations_.begin(), observations_.end(),
                     [n](const SampledObservation& o) { return o.sample_size == n; });
}

int SampledRankSet::sample_size() const {
  if (!is_fixed_size()) {
    throw Error(ErrorCode::kMismatchedConfig, "sampled set has varying sample sizes");
  }
  return observations_.front().sample_size;
}

std::vector<double> SampledRankSet::RankFrequencies() const {
  const int n = sample_size();
  std::vector<double> freq(static_cast<std::size_t>(n), 0.0);
  for (const auto& o : observations_) freq[static_cast<std::size_t>(o.rank - 1)] += 1.0;
  const double m = static_cast<double>(observations_.size());
  for (double& f : freq) f /= m;
  return freq;
}

}  // namespace rankest
