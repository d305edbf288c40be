#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rankest/core_types.hpp"
#include "rankest/estimators.hpp"
#include "rankest/sampling.hpp"

namespace rankest {

struct SamplingConfig {
  SamplingScheme scheme = SamplingScheme::kWithoutReplacement;
  int sample_size = 100;                 // fixed-size runs
  std::optional<AdaptiveConfig> adaptive;  // set for adaptive runs
};

// Estimator names are EstimatorMethodName values plus "ORACLE", which reads
// the true empirical pmf of the population.
struct ExperimentConfig {
  int n_items = 2000;
  std::size_t n_users = 25000;
  double beta_a = 0.5;
  SamplingConfig sampling;
  std::vector<std::string> estimators = {"MLE"};
  std::vector<MetricKind> metric_kinds = {MetricKind::kRecall};
  int k_lo = 1;
  int k_hi = 50;
  int repeats = 100;
  std::uint64_t base_seed = 0;
  double gamma = 0.01;
  double eta = 0.001;
  int threads = 0;  // 0: hardware concurrency

  void Validate() const;
};

// JSON with snake_case keys: n_items, n_users, beta_a,
// sampling {scheme, sample_size | adaptive {initial_size, terminal_size}},
// estimators, metric_kinds, k_range [lo, hi], repeats, base_seed, gamma, eta,
// threads. Missing keys keep their defaults.
ExperimentConfig ParseExperimentConfig(const std::string& json_text);
ExperimentConfig LoadExperimentConfig(const std::string& path);

struct ReportRow {
  std::string estimator;
  MetricKind metric = MetricKind::kRecall;
  double mean_rel_err = 0.0;  // fraction, mean over repeats
  double std_rel_err = 0.0;   // sample standard deviation over repeats
  double mean_sample_size = 0.0;
  std::vector<double> per_repeat;  // average relative error of each repeat
  int skipped_k = 0;               // K with zero true metric, per repeat
};

struct ExperimentReport {
  std::vector<ReportRow> rows;

  const ReportRow& Row(const std::string& estimator, MetricKind metric) const;
};

// Synthesized population for cfg (drawn once from base_seed).
GlobalRankSet ExperimentPopulation(const ExperimentConfig& cfg);
// Seed of repeat i, derived from (base_seed, i).
std::uint64_t RepeatSeed(const ExperimentConfig& cfg, int repeat);
// Fixed-size or adaptive samples for one repeat seed.
SampledRankSet DrawSamples(const ExperimentConfig& cfg, const GlobalRankSet& population, std::uint64_t seed);

ExperimentReport RunExperiment(const ExperimentConfig& cfg);
ExperimentReport RunExperiment(const ExperimentConfig& cfg, const GlobalRankSet& population);

// Header `estimator,metric,mean_rel_err_pct,std_rel_err_pct,mean_sample_size`.
void WriteReport(std::ostream& out, const ExperimentReport& report);

struct WinnerAccuracy {
  std::string estimator;
  double accuracy = 0.0;
};

// For each repeat, every population is sampled and estimated at `spec`; the
// estimated argmax is compared with the true argmax. Ties go to the lowest
// index for both.
std::vector<WinnerAccuracy> ComputeWinnerAccuracy(const std::vector<GlobalRankSet>& populations,
                                                  const ExperimentConfig& cfg, const MetricSpec& spec);

struct VarianceCheck {
  double empirical_var = 0.0;
  double analytic_var = 0.0;
  double z_score = 0.0;
};

// Variance of sum_i w_i X_i with X ~ Multinomial(M, theta): empirical over
// `draws` samples against M (sum w^2 theta - (sum w theta)^2).
VarianceCheck MultinomialVarianceCheck(const std::vector<double>& weights, const std::vector<double>& theta,
                                       int n_trials, int draws, std::uint64_t seed);

}  // namespace rankest
