#include "rankest/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "internal/log_math.hpp"
#include "rankest/rng.hpp"

namespace rankest {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Success probability (R - 1) / (N - 1) and its complement, both exact ratios.
double Theta(int n_items, int global_rank) {
  return static_cast<double>(global_rank - 1) / static_cast<double>(n_items - 1);
}

double ThetaComplement(int n_items, int global_rank) {
  return static_cast<double>(n_items - global_rank) / static_cast<double>(n_items - 1);
}

double LogProbAt(const ConditionalRankModel& model, int global_rank, int k) {
  const int draws = model.sample_size - 1;
  if (model.scheme == SamplingScheme::kWithReplacement) {
    return internal::BinomialLogPmf(k, draws, Theta(model.n_items, global_rank),
                                    ThetaComplement(model.n_items, global_rank));
  }
  return internal::HypergeometricLogPmf(k, global_rank - 1, model.n_items - global_rank, draws);
}

void CheckGlobalRank(const ConditionalRankModel& model, int global_rank) {
  if (global_rank < 1 || global_rank > model.n_items) {
    throw Error(ErrorCode::kRankOutOfRange, "global rank " + std::to_string(global_rank) +
                                                " outside [1, " + std::to_string(model.n_items) + "]");
  }
}

// Draws `draws` items without replacement from a pool of `total` items of
// which `good` rank above the target, updating the pool. Returns how many of
// the drawn items rank above the target.
int DrawWithoutReplacement(SplitMix64& rng, int& good, int& total, int draws) {
  int hits = 0;
  for (int i = 0; i < draws; ++i) {
    if (good == 0) {
      total -= draws - i;
      break;
    }
    if (good == total) {
      hits += draws - i;
      good -= draws - i;
      total -= draws - i;
      break;
    }
    if (UniformUnit(rng) * total < good) {
      ++hits;
      --good;
    }
    --total;
  }
  return hits;
}

int DrawWithReplacement(SplitMix64& rng, double theta, int draws) {
  if (theta <= 0.0) return 0;
  if (theta >= 1.0) return draws;
  std::binomial_distribution<int> dist(draws, theta);
  return dist(rng);
}

}  // namespace

void ConditionalRankModel::Validate() const {
  if (n_items < 2 || n_items > kMaxItems) {
    throw Error(ErrorCode::kInvalidArgument, "n_items must be in [2, " + std::to_string(kMaxItems) + "]");
  }
  if (sample_size < 2 || sample_size > kMaxSampleSize) {
    throw Error(ErrorCode::kInvalidSampleSize, "sample size must be in [2, " +
                                                   std::to_string(kMaxSampleSize) + "], got " +
                                                   std::to_string(sample_size));
  }
  if (scheme == SamplingScheme::kWithoutReplacement && sample_size > n_items) {
    throw Error(ErrorCode::kInvalidSampleSize, "sample size " + std::to_string(sample_size) +
                                                   " exceeds N=" + std::to_string(n_items) +
                                                   " without replacement");
  }
}

double ConditionalLogProb(const ConditionalRankModel& model, int global_rank, int sampled_rank) {
  CheckGlobalRank(model, global_rank);
  return LogProbAt(model, global_rank, sampled_rank - 1);
}

double ConditionalProb(const ConditionalRankModel& model, int global_rank, int sampled_rank) {
  return std::exp(ConditionalLogProb(model, global_rank, sampled_rank));
}

std::vector<double> ConditionalPmf(const ConditionalRankModel& model, int global_rank) {
  model.Validate();
  CheckGlobalRank(model, global_rank);
  std::vector<double> row(static_cast<std::size_t>(model.sample_size));
  for (int r = 1; r <= model.sample_size; ++r) {
    row[static_cast<std::size_t>(r - 1)] = ConditionalProb(model, global_rank, r);
  }
  return row;
}

std::vector<double> LikelihoodColumn(const ConditionalRankModel& model, int sampled_rank) {
  model.Validate();
  if (sampled_rank < 1 || sampled_rank > model.sample_size) {
    throw Error(ErrorCode::kInvalidObservation, "sampled rank " + std::to_string(sampled_rank) +
                                                    " outside [1, " + std::to_string(model.sample_size) + "]");
  }
  std::vector<double> col(static_cast<std::size_t>(model.n_items));
  for (int R = 1; R <= model.n_items; ++R) {
    col[static_cast<std::size_t>(R - 1)] = std::exp(LogProbAt(model, R, sampled_rank - 1));
  }
  return col;
}

ConditionalMatrix::ConditionalMatrix(const ConditionalRankModel& model) : model_(model) {
  model_.Validate();
  const double n_cells = static_cast<double>(model_.n_items) * model_.sample_size;
  if (n_cells > kMaxConditionalCells) {
    throw Error(ErrorCode::kMemoryGuard, "conditional matrix of " + std::to_string(n_cells) + " cells");
  }
  cells_.resize(static_cast<std::size_t>(model_.n_items) * static_cast<std::size_t>(model_.sample_size));
  for (int r = 1; r <= model_.sample_size; ++r) {
    const auto col = LikelihoodColumn(model_, r);
    for (int R = 1; R <= model_.n_items; ++R) {
      cells_[static_cast<std::size_t>(R - 1) * static_cast<std::size_t>(model_.sample_size) +
             static_cast<std::size_t>(r - 1)] = col[static_cast<std::size_t>(R - 1)];
    }
  }
}

SampledRankSet SampleRanks(const GlobalRankSet& ranks, int sample_size, SamplingScheme scheme,
                           std::uint64_t seed) {
  const ConditionalRankModel model{ranks.n_items(), sample_size, scheme};
  model.Validate();
  const int draws = sample_size - 1;
  std::vector<SampledObservation> obs;
  obs.reserve(ranks.size());
  for (std::size_t u = 0; u < ranks.size(); ++u) {
    const int R = ranks.ranks()[u];
    auto rng = MakeStream(seed, StreamTag::kItemSampling, u);
    int better = 0;
    if (scheme == SamplingScheme::kWithReplacement) {
      better = DrawWithReplacement(rng, Theta(ranks.n_items(), R), draws);
    } else {
      int good = R - 1;
      int total = ranks.n_items() - 1;
      better = DrawWithoutReplacement(rng, good, total, draws);
    }
    obs.push_back({better + 1, sample_size});
  }
  return SampledRankSet(ranks.n_items(), std::move(obs));
}

SampledRecallMoments ExpectedSampledRecall(const RankPmf& pmf, int sample_size, int cutoff,
                                           SamplingScheme scheme) {
  const ConditionalRankModel model{pmf.n_items(), sample_size, scheme};
  model.Validate();
  if (cutoff < 1 || cutoff > sample_size) {
    throw Error(ErrorCode::kInvalidArgument, "cutoff must be in [1, n]");
  }
  SampledRecallMoments out;
  for (int R = 1; R <= pmf.n_items(); ++R) {
    const double w = pmf(R);
    if (w == 0.0) continue;
    double p = 0.0;
    for (int r = 1; r <= cutoff; ++r) p += ConditionalProb(model, R, r);
    p = std::clamp(p, 0.0, 1.0);
    out.mean += w * p;
    out.per_user_variance += w * p * (1.0 - p);
  }
  return out;
}

std::vector<double> ExpectedSampledRecallCurve(const RankPmf& pmf, int sample_size, SamplingScheme scheme) {
  const ConditionalRankModel model{pmf.n_items(), sample_size, scheme};
  model.Validate();
  std::vector<double> marginal(static_cast<std::size_t>(sample_size), 0.0);
  for (int R = 1; R <= pmf.n_items(); ++R) {
    const double w = pmf(R);
    if (w == 0.0) continue;
    for (int r = 1; r <= sample_size; ++r) marginal[static_cast<std::size_t>(r - 1)] += w * ConditionalProb(model, R, r);
  }
  std::vector<double> curve(marginal.size());
  double running = 0.0;
  for (std::size_t i = 0; i < marginal.size(); ++i) {
    running += marginal[i];
    curve[i] = std::min(running, 1.0);
  }
  return curve;
}

void AdaptiveConfig::Validate(int n_items) const {
  if (initial_size < 2) throw Error(ErrorCode::kInvalidSampleSize, "initial size must be >= 2");
  if (terminal_size < initial_size || terminal_size > kMaxSampleSize) {
    throw Error(ErrorCode::kInvalidSampleSize, "terminal size must be in [n0, " +
                                                   std::to_string(kMaxSampleSize) + "]");
  }
  int size = initial_size;
  while (size < terminal_size) size *= 2;
  if (size != terminal_size) {
    throw Error(ErrorCode::kInvalidSampleSize, "terminal size must be n0 times a power of two");
  }
  if (scheme == SamplingScheme::kWithoutReplacement && terminal_size > n_items) {
    throw Error(ErrorCode::kInvalidSampleSize, "terminal size exceeds N without replacement");
  }
}

std::vector<int> AdaptiveConfig::Sizes() const {
  std::vector<int> sizes;
  for (int size = initial_size; size <= terminal_size; size *= 2) sizes.push_back(size);
  return sizes;
}

SampledRankSet AdaptiveSample(const GlobalRankSet& ranks, const AdaptiveConfig& cfg, std::uint64_t seed) {
  cfg.Validate(ranks.n_items());
  if (ranks.n_items() < 2) throw Error(ErrorCode::kInvalidArgument, "n_items must be >= 2");
  std::vector<SampledObservation> obs;
  obs.reserve(ranks.size());
  for (std::size_t u = 0; u < ranks.size(); ++u) {
    const int R = ranks.ranks()[u];
    auto rng = MakeStream(seed, StreamTag::kAdaptiveSampling, u);
    const double theta = Theta(ranks.n_items(), R);
    int good = R - 1;
    int total = ranks.n_items() - 1;
    auto draw = [&](int count) {
      return cfg.scheme == SamplingScheme::kWithReplacement ? DrawWithReplacement(rng, theta, count)
                                                            : DrawWithoutReplacement(rng, good, total, count);
    };
    int size = cfg.initial_size;
    int better = draw(size - 1);
    while (better == 0 && size < cfg.terminal_size) {
      better += draw(size);
      size *= 2;
    }
    obs.push_back({better + 1, size});
  }
  return SampledRankSet(ranks.n_items(), std::move(obs));
}

CostProfile ComputeCostProfile(const SampledRankSet& samples, const AdaptiveConfig& cfg) {
  CostProfile profile;
  profile.sizes = cfg.Sizes();
  profile.user_counts.assign(profile.sizes.size(), 0);
  for (const auto& o : samples.observations()) {
    const auto it = std::find(profile.sizes.begin(), profile.sizes.end(), o.sample_size);
    if (it == profile.sizes.end()) {
      throw Error(ErrorCode::kMismatchedConfig,
                  "sample size " + std::to_string(o.sample_size) + " is not on the adaptive ladder");
    }
    ++profile.user_counts[static_cast<std::size_t>(it - profile.sizes.begin())];
  }
  const double m_total = static_cast<double>(samples.size());
  double remaining = m_total;
  profile.costs.resize(profile.sizes.size());
  for (std::size_t j = 0; j < profile.sizes.size(); ++j) {
    const double m_j = static_cast<double>(profile.user_counts[j]);
    const double step = j == 0 ? profile.sizes[0] : profile.sizes[j] - profile.sizes[j - 1];
    if (m_j > 0) profile.costs[j] = remaining * step / m_j;
    remaining -= m_j;
  }
  return profile;
}

}  // namespace rankest
