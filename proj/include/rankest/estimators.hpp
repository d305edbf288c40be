#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "rankest/core_types.hpp"
#include "rankest/sampling.hpp"

namespace rankest {

// ---- MLE / EM ----

enum class EmWeightKind { kNone, kAp, kNdcg };

std::string_view EmWeightKindName(EmWeightKind kind);
// "none", "ap", "ndcg".
EmWeightKind ParseEmWeightKind(std::string_view name);

struct EmConfig {
  int max_iters = 200;
  double rel_tol = 1e-7;
  std::optional<RankPmf> init;  // uniform when empty
  // w_AP(r) = C / r, w_NDCG(r) = 1 / log2(r / C + 1).
  EmWeightKind weight = EmWeightKind::kNone;
  double weight_c = 10.0;
  // Overrides `weight` when set; must be nonnegative.
  std::function<double(int)> weight_fn;
  SamplingScheme scheme = SamplingScheme::kWithReplacement;

  void Validate(int n_items) const;
  double Weight(int sampled_rank) const;
};

struct EmResult {
  RankPmf pmf;
  // Weighted mean log-likelihood of every iterate, starting with the initializer.
  std::vector<double> log_likelihood;
  int iterations = 0;
  bool converged = false;
};

// Fixed sample size. Iterates over the distinct observed r only.
EmResult MleEm(const SampledRankSet& samples, const EmConfig& cfg = {});

// Per-user n_u. Observations are grouped by distinct (r, n); with equal n_u
// the trajectory is identical to MleEm.
EmResult AdaptiveMleEm(const SampledRankSet& samples, const EmConfig& cfg = {});

// ---- MES ----

struct MesConfig {
  double eta = 0.001;
  int max_iters = 2000;
  double step_size = 1.0;  // initial exponentiated-gradient step
  double rel_tol = 1e-9;
  std::optional<RankPmf> init;
  SamplingScheme scheme = SamplingScheme::kWithReplacement;

  void Validate(int n_items) const;
};

struct MesResult {
  RankPmf pmf;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
};

// eta H(pi) - sum_r P~(r) (sum_R P(r|R) pi_R - P~(r))^2.
double MesObjective(const ConditionalMatrix& cond, std::span<const double> sampled_freq,
                    std::span<const double> pi, double eta);

// Maximizes MesObjective over the simplex by exponentiated gradient with a
// backtracking line search. Returns the last iterate with converged = false if
// the iteration cap is hit.
MesResult Mes(const SampledRankSet& samples, const MesConfig& cfg = {});
MesResult Mes(const ConditionalMatrix& cond, std::span<const double> sampled_freq, const MesConfig& cfg);

// ---- BV and MN ----

// Solutions of the n x n normal systems for a given prior. The factorization
// is done once; each metric is then one back-substitution.
class LinearMetricSolver {
 public:
  virtual ~LinearMetricSolver();

  // Adjusted metric function F^(r), r = 1..n.
  std::vector<double> AdjustedMetric(const MetricSpec& spec) const;
  // sum_r P~(r) F^(r).
  double Metric(std::span<const double> sampled_freq, const MetricSpec& spec) const;
  // Weights z_R with sum_r P~(r) F^(r) = sum_R z_R F(R) for every metric F.
  std::vector<double> ImpliedRankWeights(std::span<const double> sampled_freq) const;

  int n_items() const;
  int sample_size() const;

 protected:
  struct Impl;
  explicit LinearMetricSolver(std::unique_ptr<Impl> impl);
  static std::unique_ptr<Impl> MakeImpl(const ConditionalMatrix& cond, const RankPmf& prior);
  std::unique_ptr<Impl> impl_;
};

// ((1 - gamma) A^T A + gamma diag(c)) F^ = A^T b with A_{R,r} = sqrt(P(R)) P(r|R),
// b_R = sqrt(P(R)) F(R), c_r = sum_R P(R) P(r|R).
class BvSolver : public LinearMetricSolver {
 public:
  BvSolver(const ConditionalMatrix& cond, const RankPmf& prior, double gamma = 0.01);
};

// (A^T D A - A^T A / M + Lambda1 / M) x = A^T D b with A_{R,r} = P(r|R),
// D = diag(P(R)), Lambda1 = diag(sum_R P(r|R)), b = F.
class MnSolver : public LinearMetricSolver {
 public:
  MnSolver(const ConditionalMatrix& cond, const RankPmf& prior, double n_users);
};

struct AdjustedMetricResult {
  double metric = 0.0;
  std::vector<double> f_hat;
};

AdjustedMetricResult BvMetric(const SampledRankSet& samples, const RankPmf& prior, const MetricSpec& spec,
                              double gamma = 0.01,
                              SamplingScheme scheme = SamplingScheme::kWithReplacement);

AdjustedMetricResult MnMetric(const SampledRankSet& samples, const RankPmf& prior, double n_users,
                              const MetricSpec& spec,
                              SamplingScheme scheme = SamplingScheme::kWithReplacement);

struct BvRankPmfResult {
  RankPmf pmf;
  int clamped = 0;  // negative increments set to zero before renormalizing
};

// P^(R) = T^_{Recall@R} - T^_{Recall@R-1} under the BV estimator.
BvRankPmfResult BvRankPmf(const SampledRankSet& samples, const RankPmf& prior, double gamma = 0.01,
                          SamplingScheme scheme = SamplingScheme::kWithReplacement);

// ---- Composed pipelines ----

enum class EstimatorMethod { kMle, kMes, kBv, kBvMle, kBvMes, kMnMle, kMnMes, kAdaptiveMle };

std::string_view EstimatorMethodName(EstimatorMethod method);
// Accepts the upper-case names used in reports, e.g. "MN_MES", and lower case.
EstimatorMethod ParseEstimatorMethod(std::string_view name);

struct EstimateOptions {
  EmConfig em;
  MesConfig mes;
  double gamma = 0.01;
  std::optional<RankPmf> bv_prior;  // BV only; uniform when empty
  SamplingScheme scheme = SamplingScheme::kWithReplacement;
};

// Runs the estimator stages on one sampled set, caching the MLE and MES pmfs
// and the conditional matrix so several methods can share them.
class EstimatorPipeline {
 public:
  EstimatorPipeline(const SampledRankSet& samples, EstimateOptions opts);
  ~EstimatorPipeline();
  EstimatorPipeline(const EstimatorPipeline&) = delete;
  EstimatorPipeline& operator=(const EstimatorPipeline&) = delete;

  // Weights z_R such that the estimate of any metric F is sum_R z_R F(R).
  // For the pmf methods z is the estimated pmf; for BV/MN it is implied by
  // the adjusted metric function and may be negative.
  std::vector<double> RankWeights(EstimatorMethod method);

  // Pmf of the pmf methods, the prior stage of BV_* / MN_*, or the clamped
  // BV rank pmf for kBv.
  RankPmf Pmf(EstimatorMethod method);

 private:
  struct State;
  std::unique_ptr<State> state_;
};

// Metric values for K = 1..k_max under one method.
std::vector<double> EstimateCurve(const SampledRankSet& samples, EstimatorMethod method, MetricKind kind,
                                  int k_max, const EstimateOptions& opts = {});

double Estimate(const SampledRankSet& samples, EstimatorMethod method, const MetricSpec& spec,
                const EstimateOptions& opts = {});

RankPmf EstimatePmf(const SampledRankSet& samples, EstimatorMethod method, const EstimateOptions& opts = {});

}  // namespace rankest
