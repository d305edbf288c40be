#include "rankest/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "rankest/metrics.hpp"

namespace rankest {

// ---- MLE / EM ----

std::string_view EmWeightKindName(EmWeightKind kind) {
  switch (kind) {
    case EmWeightKind::kNone: return "none";
    case EmWeightKind::kAp: return "ap";
    case EmWeightKind::kNdcg: return "ndcg";
  }
  return "unknown";
}

EmWeightKind ParseEmWeightKind(std::string_view name) {
  if (name == "none") return EmWeightKind::kNone;
  if (name == "ap") return EmWeightKind::kAp;
  if (name == "ndcg") return EmWeightKind::kNdcg;
  throw Error(ErrorCode::kParse, "unknown weight kind '" + std::string(name) + "'");
}

void EmConfig::Validate(int n_items) const {
  if (max_iters < 1) throw Error(ErrorCode::kInvalidArgument, "EM max_iters must be >= 1");
  if (!(rel_tol > 0.0)) throw Error(ErrorCode::kInvalidArgument, "EM rel_tol must be > 0");
  if (weight != EmWeightKind::kNone && !(weight_c > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "EM weight constant C must be > 0");
  }
  if (init && init->n_items() != n_items) {
    throw Error(ErrorCode::kSizeMismatch, "EM initializer has the wrong number of ranks");
  }
}

double EmConfig::Weight(int sampled_rank) const {
  if (weight_fn) return weight_fn(sampled_rank);
  const double r = sampled_rank;
  switch (weight) {
    case EmWeightKind::kNone: return 1.0;
    case EmWeightKind::kAp: return weight_c / r;
    case EmWeightKind::kNdcg: return 1.0 / std::log2(r / weight_c + 1.0);
  }
  return 1.0;
}

namespace {

struct EmGroup {
  int rank;
  int sample_size;
  double weight;
  std::vector<double> likelihood;  // P(r | R) over R = 1..N
};

std::vector<EmGroup> BuildGroups(const SampledRankSet& samples, const EmConfig& cfg) {
  std::map<std::pair<int, int>, std::size_t> counts;
  for (const auto& o : samples.observations()) ++counts[{o.sample_size, o.rank}];
  std::vector<EmGroup> groups;
  groups.reserve(counts.size());
  double total = 0.0;
  for (const auto& [key, count] : counts) {
    const double w = cfg.Weight(key.second);
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::kInvalidArgument, "EM weights must be finite and nonnegative");
    }
    const double gw = static_cast<double>(count) * w;
    total += gw;
    if (gw == 0.0) continue;
    const ConditionalRankModel model{samples.n_items(), key.first, cfg.scheme};
    groups.push_back({key.second, key.first, gw, LikelihoodColumn(model, key.second)});
  }
  if (total <= 0.0) throw Error(ErrorCode::kInvalidArgument, "EM weights are zero on every observation");
  for (auto& g : groups) g.weight /= total;
  return groups;
}

EmResult RunEm(const std::vector<EmGroup>& groups, int n_items, const EmConfig& cfg) {
  const auto n = static_cast<std::size_t>(n_items);
  std::vector<double> pi = cfg.init ? std::vector<double>(cfg.init->probs().begin(), cfg.init->probs().end())
                                    : std::vector<double>(n, 1.0 / static_cast<double>(n_items));
  std::vector<double> next(n);
  std::vector<double> coef(groups.size());
  EmResult result{RankPmf::Uniform(1), {}, 0, false};
  for (int iter = 0;; ++iter) {
    double ll = 0.0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const auto& lik = groups[g].likelihood;
      double denom = 0.0;
      for (std::size_t R = 0; R < n; ++R) denom += pi[R] * lik[R];
      if (!(denom > 0.0) || !std::isfinite(denom)) {
        throw Error(ErrorCode::kDegenerateLikelihood,
                    "observed rank " + std::to_string(groups[g].rank) + " has zero likelihood");
      }
      ll += groups[g].weight * std::log(denom);
      coef[g] = groups[g].weight / denom;
    }
    if (!result.log_likelihood.empty()) {
      const double prev = result.log_likelihood.back();
      result.log_likelihood.push_back(ll);
      if (std::abs(ll - prev) <= cfg.rel_tol * std::abs(prev)) {
        result.converged = true;
        break;
      }
    } else {
      result.log_likelihood.push_back(ll);
    }
    if (iter == cfg.max_iters) break;

    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const auto& lik = groups[g].likelihood;
      const double c = coef[g];
      for (std::size_t R = 0; R < n; ++R) next[R] += c * lik[R];
    }
    double total = 0.0;
    for (std::size_t R = 0; R < n; ++R) {
      next[R] *= pi[R];
      total += next[R];
    }
    for (std::size_t R = 0; R < n; ++R) pi[R] = next[R] / total;
    result.iterations = iter + 1;
  }
  result.pmf = RankPmf::FromWeights(std::move(pi));
  return result;
}

}  // namespace

EmResult MleEm(const SampledRankSet& samples, const EmConfig& cfg) {
  if (!samples.is_fixed_size()) {
    throw Error(ErrorCode::kMismatchedConfig, "MLE needs a fixed sample size; use the adaptive variant");
  }
  return AdaptiveMleEm(samples, cfg);
}

EmResult AdaptiveMleEm(const SampledRankSet& samples, const EmConfig& cfg) {
  cfg.Validate(samples.n_items());
  return RunEm(BuildGroups(samples, cfg), samples.n_items(), cfg);
}

// ---- MES ----

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;

ConstMatrixMap MapConditional(const ConditionalMatrix& cond) {
  return ConstMatrixMap(cond.cells().data(), cond.rows(), cond.cols());
}

double Entropy(const Eigen::VectorXd& pi) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < pi.size(); ++i) {
    if (pi[i] > 0.0) h -= pi[i] * std::log(pi[i]);
  }
  return h;
}

double MesObjectiveImpl(const ConstMatrixMap& a, const Eigen::VectorXd& freq, const Eigen::VectorXd& pi,
                        double eta) {
  const Eigen::VectorXd q = a.transpose() * pi;
  const double err = (freq.array() * (q - freq).array().square()).sum();
  return eta * Entropy(pi) - err;
}

void CheckFrequencies(const ConditionalMatrix& cond, std::span<const double> freq) {
  if (static_cast<int>(freq.size()) != cond.cols()) {
    throw Error(ErrorCode::kSizeMismatch, "sampled-rank frequencies do not match sample size");
  }
}

}  // namespace

void MesConfig::Validate(int n_items) const {
  if (!(eta >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "MES eta must be >= 0");
  if (max_iters < 1) throw Error(ErrorCode::kInvalidArgument, "MES max_iters must be >= 1");
  if (!(step_size > 0.0)) throw Error(ErrorCode::kInvalidArgument, "MES step size must be > 0");
  if (!(rel_tol > 0.0)) throw Error(ErrorCode::kInvalidArgument, "MES rel_tol must be > 0");
  if (init && init->n_items() != n_items) {
    throw Error(ErrorCode::kSizeMismatch, "MES initializer has the wrong number of ranks");
  }
}

double MesObjective(const ConditionalMatrix& cond, std::span<const double> sampled_freq,
                    std::span<const double> pi, double eta) {
  CheckFrequencies(cond, sampled_freq);
  if (static_cast<int>(pi.size()) != cond.rows()) throw Error(ErrorCode::kSizeMismatch, "pi has wrong length");
  const Eigen::VectorXd freq = Eigen::Map<const Eigen::VectorXd>(sampled_freq.data(), cond.cols());
  const Eigen::VectorXd p = Eigen::Map<const Eigen::VectorXd>(pi.data(), cond.rows());
  return MesObjectiveImpl(MapConditional(cond), freq, p, eta);
}

MesResult Mes(const ConditionalMatrix& cond, std::span<const double> sampled_freq, const MesConfig& cfg) {
  cfg.Validate(cond.rows());
  CheckFrequencies(cond, sampled_freq);
  const auto a = MapConditional(cond);
  const Eigen::VectorXd freq = Eigen::Map<const Eigen::VectorXd>(sampled_freq.data(), cond.cols());
  const Eigen::Index n_items = cond.rows();

  Eigen::VectorXd pi = cfg.init ? Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(cfg.init->probs().data(), n_items))
                                : Eigen::VectorXd::Constant(n_items, 1.0 / static_cast<double>(n_items));
  double obj = MesObjectiveImpl(a, freq, pi, cfg.eta);
  double step = cfg.step_size;
  constexpr double kMaxStep = 1e12;
  constexpr double kMinStep = 1e-30;
  constexpr double kArmijo = 1e-4;

  MesResult result{RankPmf::Uniform(1), obj, 0, false};
  Eigen::VectorXd grad(n_items);
  Eigen::VectorXd cand(n_items);
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    const Eigen::VectorXd q = a.transpose() * pi;
    const Eigen::VectorXd v = 2.0 * (freq.array() * (q - freq).array()).matrix();
    grad = -(a * v);
    for (Eigen::Index i = 0; i < n_items; ++i) {
      if (pi[i] > 0.0) grad[i] -= cfg.eta * (std::log(pi[i]) + 1.0);
    }
    double g_max = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n_items; ++i) {
      if (pi[i] > 0.0) g_max = std::max(g_max, grad[i]);
    }

    step = std::min(step * 2.0, kMaxStep);
    bool accepted = false;
    double cand_obj = obj;
    while (step >= kMinStep) {
      for (Eigen::Index i = 0; i < n_items; ++i) {
        cand[i] = pi[i] > 0.0 ? pi[i] * std::exp(step * (grad[i] - g_max)) : 0.0;
      }
      cand /= cand.sum();
      cand_obj = MesObjectiveImpl(a, freq, cand, cfg.eta);
      if (cand_obj >= obj + kArmijo * grad.dot(cand - pi)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    result.iterations = iter + 1;
    if (!accepted) {
      // No ascent step exists at machine precision: stationary.
      result.converged = true;
      break;
    }
    const double change = std::abs(cand_obj - obj);
    pi = cand;
    const double prev = obj;
    obj = cand_obj;
    if (change <= cfg.rel_tol * std::max(std::abs(prev), 1e-300)) {
      result.converged = true;
      break;
    }
  }
  result.objective = obj;
  result.pmf = RankPmf::FromWeights(std::vector<double>(pi.data(), pi.data() + pi.size()));
  return result;
}

MesResult Mes(const SampledRankSet& samples, const MesConfig& cfg) {
  const ConditionalMatrix cond({samples.n_items(), samples.sample_size(), cfg.scheme});
  const auto freq = samples.RankFrequencies();
  return Mes(cond, freq, cfg);
}

// ---- BV and MN ----

struct LinearMetricSolver::Impl {
  RowMatrix a;  // P(r | R), N x n
  Eigen::VectorXd prior;
  Eigen::LDLT<Eigen::MatrixXd> ldlt;

  void Factor(Eigen::MatrixXd system) {
    constexpr double kRidge = 1e-12;
    if (TryFactor(system)) return;
    system.diagonal().array() += kRidge;
    if (TryFactor(system)) return;
    throw Error(ErrorCode::kSingularSystem, "normal matrix is singular after diagonal regularization");
  }

  bool TryFactor(const Eigen::MatrixXd& system) {
    ldlt.compute(system);
    if (ldlt.info() != Eigen::Success) return false;
    const Eigen::VectorXd d = ldlt.vectorD();
    if (!d.allFinite()) return false;
    const double scale = d.cwiseAbs().maxCoeff();
    const double floor = scale * static_cast<double>(d.size()) * std::numeric_limits<double>::epsilon();
    return scale > 0.0 && d.cwiseAbs().minCoeff() > floor;
  }

  Eigen::VectorXd Solve(const Eigen::VectorXd& rhs) const {
    Eigen::VectorXd x = ldlt.solve(rhs);
    if (!x.allFinite()) throw Error(ErrorCode::kSingularSystem, "solution of the normal system is not finite");
    return x;
  }

  Eigen::VectorXd MetricOverRanks(const MetricSpec& spec) const {
    Eigen::VectorXd f(a.rows());
    for (Eigen::Index R = 0; R < a.rows(); ++R) f[R] = MetricFn(spec, static_cast<int>(R) + 1);
    return f;
  }
};

std::unique_ptr<LinearMetricSolver::Impl> LinearMetricSolver::MakeImpl(const ConditionalMatrix& cond, const RankPmf& prior) {
  if (prior.n_items() != cond.rows()) {
    throw Error(ErrorCode::kSizeMismatch, "prior length differs from N");
  }
  auto impl = std::make_unique<LinearMetricSolver::Impl>();
  impl->a = MapConditional(cond);
  impl->prior = Eigen::Map<const Eigen::VectorXd>(prior.probs().data(), prior.n_items());
  return impl;
}

LinearMetricSolver::LinearMetricSolver(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
LinearMetricSolver::~LinearMetricSolver() = default;

int LinearMetricSolver::n_items() const { return static_cast<int>(impl_->a.rows()); }
int LinearMetricSolver::sample_size() const { return static_cast<int>(impl_->a.cols()); }

std::vector<double> LinearMetricSolver::AdjustedMetric(const MetricSpec& spec) const {
  const Eigen::VectorXd rhs = impl_->a.transpose() * impl_->prior.cwiseProduct(impl_->MetricOverRanks(spec));
  const Eigen::VectorXd x = impl_->Solve(rhs);
  return {x.data(), x.data() + x.size()};
}

double LinearMetricSolver::Metric(std::span<const double> sampled_freq, const MetricSpec& spec) const {
  if (static_cast<int>(sampled_freq.size()) != sample_size()) {
    throw Error(ErrorCode::kSizeMismatch, "sampled-rank frequencies do not match sample size");
  }
  const auto x = AdjustedMetric(spec);
  double total = 0.0;
  for (std::size_t r = 0; r < x.size(); ++r) total += sampled_freq[r] * x[r];
  return total;
}

std::vector<double> LinearMetricSolver::ImpliedRankWeights(std::span<const double> sampled_freq) const {
  if (static_cast<int>(sampled_freq.size()) != sample_size()) {
    throw Error(ErrorCode::kSizeMismatch, "sampled-rank frequencies do not match sample size");
  }
  const Eigen::VectorXd y = impl_->Solve(Eigen::Map<const Eigen::VectorXd>(sampled_freq.data(), sample_size()));
  const Eigen::VectorXd z = impl_->prior.cwiseProduct(impl_->a * y);
  return {z.data(), z.data() + z.size()};
}

BvSolver::BvSolver(const ConditionalMatrix& cond, const RankPmf& prior, double gamma)
    : LinearMetricSolver(MakeImpl(cond, prior)) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "gamma must be in (0, 1]");
  const auto& a = impl_->a;
  const Eigen::MatrixXd weighted = impl_->prior.asDiagonal() * a;
  Eigen::MatrixXd system = (1.0 - gamma) * (a.transpose() * weighted);
  const Eigen::VectorXd c = a.transpose() * impl_->prior;
  system.diagonal() += gamma * c;
  impl_->Factor(std::move(system));
}

MnSolver::MnSolver(const ConditionalMatrix& cond, const RankPmf& prior, double n_users)
    : LinearMetricSolver(MakeImpl(cond, prior)) {
  if (!(n_users >= 1.0)) throw Error(ErrorCode::kInvalidArgument, "user count M must be >= 1");
  const auto& a = impl_->a;
  const Eigen::MatrixXd weighted = impl_->prior.asDiagonal() * a;
  Eigen::MatrixXd system = a.transpose() * weighted;
  system.noalias() -= (a.transpose() * a) / n_users;
  const Eigen::VectorXd lambda = a.colwise().sum().transpose();
  system.diagonal() += lambda / n_users;
  impl_->Factor(std::move(system));
}

AdjustedMetricResult BvMetric(const SampledRankSet& samples, const RankPmf& prior, const MetricSpec& spec,
                              double gamma, SamplingScheme scheme) {
  const ConditionalMatrix cond({samples.n_items(), samples.sample_size(), scheme});
  const BvSolver solver(cond, prior, gamma);
  const auto freq = samples.RankFrequencies();
  AdjustedMetricResult out;
  out.f_hat = solver.AdjustedMetric(spec);
  for (std::size_t r = 0; r < freq.size(); ++r) out.metric += freq[r] * out.f_hat[r];
  return out;
}

AdjustedMetricResult MnMetric(const SampledRankSet& samples, const RankPmf& prior, double n_users,
                              const MetricSpec& spec, SamplingScheme scheme) {
  const ConditionalMatrix cond({samples.n_items(), samples.sample_size(), scheme});
  const MnSolver solver(cond, prior, n_users);
  const auto freq = samples.RankFrequencies();
  AdjustedMetricResult out;
  out.f_hat = solver.AdjustedMetric(spec);
  for (std::size_t r = 0; r < freq.size(); ++r) out.metric += freq[r] * out.f_hat[r];
  return out;
}

namespace {

BvRankPmfResult ClampToPmf(std::vector<double> z) {
  BvRankPmfResult out{RankPmf::Uniform(1), 0};
  for (double& v : z) {
    if (v < 0.0) {
      v = 0.0;
      ++out.clamped;
    }
  }
  if (std::all_of(z.begin(), z.end(), [](double v) { return v == 0.0; })) {
    throw Error(ErrorCode::kDegenerateLikelihood, "every BV rank increment is nonpositive");
  }
  out.pmf = RankPmf::FromWeights(std::move(z));
  return out;
}

}  // namespace

BvRankPmfResult BvRankPmf(const SampledRankSet& samples, const RankPmf& prior, double gamma, SamplingScheme scheme) {
  const ConditionalMatrix cond({samples.n_items(), samples.sample_size(), scheme});
  const BvSolver solver(cond, prior, gamma);
  return ClampToPmf(solver.ImpliedRankWeights(samples.RankFrequencies()));
}

// ---- Composed pipelines ----

std::string_view EstimatorMethodName(EstimatorMethod method) {
  switch (method) {
    case EstimatorMethod::kMle: return "MLE";
    case EstimatorMethod::kMes: return "MES";
    case EstimatorMethod::kBv: return "BV";
    case EstimatorMethod::kBvMle: return "BV_MLE";
    case EstimatorMethod::kBvMes: return "BV_MES";
    case EstimatorMethod::kMnMle: return "MN_MLE";
    case EstimatorMethod::kMnMes: return "MN_MES";
    case EstimatorMethod::kAdaptiveMle: return "ADAPTIVE_MLE";
  }
  return "unknown";
}

EstimatorMethod ParseEstimatorMethod(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) {
    return c == '-' ? '_' : static_cast<char>(std::toupper(c));
  });
  for (auto m : {EstimatorMethod::kMle, EstimatorMethod::kMes, EstimatorMethod::kBv, EstimatorMethod::kBvMle,
                 EstimatorMethod::kBvMes, EstimatorMethod::kMnMle, EstimatorMethod::kMnMes,
                 EstimatorMethod::kAdaptiveMle}) {
    if (upper == EstimatorMethodName(m)) return m;
  }
  if (upper == "ADAPTIVEMLE") return EstimatorMethod::kAdaptiveMle;
  throw Error(ErrorCode::kParse, "unknown estimator '" + std::string(name) + "'");
}

struct EstimatorPipeline::State {
  const SampledRankSet& samples;
  EstimateOptions opts;
  std::optional<ConditionalMatrix> cond;
  std::vector<double> freq;
  std::optional<RankPmf> mle;
  std::optional<RankPmf> mes;

  State(const SampledRankSet& s, EstimateOptions o) : samples(s), opts(std::move(o)) {
    opts.em.scheme = opts.scheme;
    opts.mes.scheme = opts.scheme;
  }

  const ConditionalMatrix& Cond() {
    if (!cond) {
      cond.emplace(ConditionalRankModel{samples.n_items(), samples.sample_size(), opts.scheme});
      freq = samples.RankFrequencies();
    }
    return *cond;
  }

  const RankPmf& MlePmf() {
    if (!mle) mle = MleEm(samples, opts.em).pmf;
    return *mle;
  }

  const RankPmf& MesPmf() {
    if (!mes) {
      const auto& c = Cond();
      mes = Mes(c, freq, opts.mes).pmf;
    }
    return *mes;
  }

  RankPmf PriorFor(EstimatorMethod method) {
    switch (method) {
      case EstimatorMethod::kBv: return opts.bv_prior ? *opts.bv_prior : RankPmf::Uniform(samples.n_items());
      case EstimatorMethod::kBvMle:
      case EstimatorMethod::kMnMle: return MlePmf();
      case EstimatorMethod::kBvMes:
      case EstimatorMethod::kMnMes: return MesPmf();
      default: break;
    }
    throw Error(ErrorCode::kInvalidArgument, "method has no prior stage");
  }

  std::vector<double> LinearWeights(EstimatorMethod method) {
    const RankPmf prior = PriorFor(method);
    const auto& c = Cond();
    if (method == EstimatorMethod::kMnMle || method == EstimatorMethod::kMnMes) {
      return MnSolver(c, prior, static_cast<double>(samples.size())).ImpliedRankWeights(freq);
    }
    return BvSolver(c, prior, opts.gamma).ImpliedRankWeights(freq);
  }
};

EstimatorPipeline::EstimatorPipeline(const SampledRankSet& samples, EstimateOptions opts)
    : state_(std::make_unique<State>(samples, std::move(opts))) {}

EstimatorPipeline::~EstimatorPipeline() = default;

RankPmf EstimatorPipeline::Pmf(EstimatorMethod method) {
  if (method != EstimatorMethod::kAdaptiveMle && !state_->samples.is_fixed_size()) {
    throw Error(ErrorCode::kMismatchedConfig,
                std::string(EstimatorMethodName(method)) + " needs a fixed sample size");
  }
  switch (method) {
    case EstimatorMethod::kMle: return state_->MlePmf();
    case EstimatorMethod::kMes: return state_->MesPmf();
    case EstimatorMethod::kAdaptiveMle: return AdaptiveMleEm(state_->samples, state_->opts.em).pmf;
    case EstimatorMethod::kBv: return ClampToPmf(state_->LinearWeights(method)).pmf;
    default: return state_->PriorFor(method);
  }
}

std::vector<double> EstimatorPipeline::RankWeights(EstimatorMethod method) {
  switch (method) {
    case EstimatorMethod::kMle:
    case EstimatorMethod::kMes:
    case EstimatorMethod::kAdaptiveMle: {
      const auto pmf = Pmf(method);
      return {pmf.probs().begin(), pmf.probs().end()};
    }
    default:
      if (!state_->samples.is_fixed_size()) {
        throw Error(ErrorCode::kMismatchedConfig,
                    std::string(EstimatorMethodName(method)) + " needs a fixed sample size");
      }
      return state_->LinearWeights(method);
  }
}

RankPmf EstimatePmf(const SampledRankSet& samples, EstimatorMethod method, const EstimateOptions& opts) {
  return EstimatorPipeline(samples, opts).Pmf(method);
}

std::vector<double> EstimateCurve(const SampledRankSet& samples, EstimatorMethod method, MetricKind kind,
                                  int k_max, const EstimateOptions& opts) {
  return MetricCurveFromWeights(EstimatorPipeline(samples, opts).RankWeights(method), kind, k_max);
}

double Estimate(const SampledRankSet& samples, EstimatorMethod method, const MetricSpec& spec,
                const EstimateOptions& opts) {
  return EstimateCurve(samples, method, spec.kind(), spec.cutoff(), opts).back();
}

}  // namespace rankest
