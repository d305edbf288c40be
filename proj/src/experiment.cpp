#include "rankest/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "rankest/metrics.hpp"
#include "rankest/population.hpp"
#include "rankest/rng.hpp"

namespace rankest {
namespace {

constexpr std::string_view kOracle = "ORACLE";

std::string CanonicalEstimator(const std::string& name) {
  std::string upper = name;
  std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
  if (upper == kOracle) return upper;
  return std::string(EstimatorMethodName(ParseEstimatorMethod(name)));
}

}  // namespace

void ExperimentConfig::Validate() const {
  if (n_items < 2 || n_items > kMaxItems) throw Error(ErrorCode::kInvalidArgument, "n_items out of range");
  if (n_users < 1) throw Error(ErrorCode::kInvalidArgument, "n_users must be >= 1");
  if (!(beta_a > 0.0)) throw Error(ErrorCode::kInvalidArgument, "beta_a must be > 0");
  if (repeats < 1) throw Error(ErrorCode::kInvalidArgument, "repeats must be >= 1");
  if (k_lo < 1 || k_hi < k_lo || k_hi > n_items) {
    throw Error(ErrorCode::kInvalidArgument, "k_range must satisfy 1 <= lo <= hi <= N");
  }
  if (estimators.empty()) throw Error(ErrorCode::kInvalidArgument, "no estimators configured");
  if (metric_kinds.empty()) throw Error(ErrorCode::kInvalidArgument, "no metric kinds configured");
  if (sampling.adaptive) {
    sampling.adaptive->Validate(n_items);
  } else {
    ConditionalRankModel{n_items, sampling.sample_size, sampling.scheme}.Validate();
  }
  for (const auto& name : estimators) {
    const std::string canon = CanonicalEstimator(name);
    const bool adaptive_method = canon == EstimatorMethodName(EstimatorMethod::kAdaptiveMle);
    if (sampling.adaptive && canon != kOracle && !adaptive_method) {
      throw Error(ErrorCode::kMismatchedConfig, canon + " cannot run on adaptive samples");
    }
  }
}

ExperimentConfig ParseExperimentConfig(const std::string& json_text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("config: ") + e.what());
  }
  ExperimentConfig cfg;
  try {
    cfg.n_items = doc.value("n_items", cfg.n_items);
    cfg.n_users = doc.value("n_users", cfg.n_users);
    cfg.beta_a = doc.value("beta_a", cfg.beta_a);
    if (doc.contains("sampling")) {
      const auto& s = doc.at("sampling");
      if (s.contains("scheme")) cfg.sampling.scheme = ParseSamplingScheme(s.at("scheme").get<std::string>());
      cfg.sampling.sample_size = s.value("sample_size", cfg.sampling.sample_size);
      if (s.contains("adaptive")) {
        const auto& a = s.at("adaptive");
        AdaptiveConfig ac;
        ac.initial_size = a.value("initial_size", ac.initial_size);
        ac.terminal_size = a.value("terminal_size", ac.terminal_size);
        ac.scheme = cfg.sampling.scheme;
        cfg.sampling.adaptive = ac;
      }
    }
    if (doc.contains("estimators")) {
      cfg.estimators.clear();
      for (const auto& e : doc.at("estimators")) cfg.estimators.push_back(CanonicalEstimator(e.get<std::string>()));
    }
    if (doc.contains("metric_kinds")) {
      cfg.metric_kinds.clear();
      for (const auto& m : doc.at("metric_kinds")) cfg.metric_kinds.push_back(ParseMetricKind(m.get<std::string>()));
    }
    if (doc.contains("k_range")) {
      const auto& k = doc.at("k_range");
      if (!k.is_array() || k.size() != 2) throw Error(ErrorCode::kParse, "k_range must be [lo, hi]");
      cfg.k_lo = k[0].get<int>();
      cfg.k_hi = k[1].get<int>();
    }
    cfg.repeats = doc.value("repeats", cfg.repeats);
    cfg.base_seed = doc.value("base_seed", cfg.base_seed);
    cfg.gamma = doc.value("gamma", cfg.gamma);
    cfg.eta = doc.value("eta", cfg.eta);
    cfg.threads = doc.value("threads", cfg.threads);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("config: ") + e.what());
  }
  cfg.Validate();
  return cfg;
}

ExperimentConfig LoadExperimentConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseExperimentConfig(buf.str());
}

const ReportRow& ExperimentReport::Row(const std::string& estimator, MetricKind metric) const {
  for (const auto& row : rows) {
    if (row.estimator == estimator && row.metric == metric) return row;
  }
  throw Error(ErrorCode::kInvalidArgument, "no report row for " + estimator);
}

GlobalRankSet ExperimentPopulation(const ExperimentConfig& cfg) {
  return DrawPopulation(SynthRankPmf(cfg.beta_a, cfg.n_items), cfg.n_users, cfg.base_seed);
}

std::uint64_t RepeatSeed(const ExperimentConfig& cfg, int repeat) {
  return DeriveSeed(cfg.base_seed, StreamTag::kRepeat, static_cast<std::uint64_t>(repeat));
}

SampledRankSet DrawSamples(const ExperimentConfig& cfg, const GlobalRankSet& population, std::uint64_t seed) {
  if (cfg.sampling.adaptive) return AdaptiveSample(population, *cfg.sampling.adaptive, seed);
  return SampleRanks(population, cfg.sampling.sample_size, cfg.sampling.scheme, seed);
}

namespace {

EstimateOptions OptionsFor(const ExperimentConfig& cfg) {
  EstimateOptions opts;
  opts.gamma = cfg.gamma;
  opts.mes.eta = cfg.eta;
  opts.scheme = cfg.sampling.scheme;
  return opts;
}

std::vector<double> RankWeightsFor(const std::string& estimator, EstimatorPipeline& pipeline,
                                   const RankPmf& oracle) {
  if (estimator == kOracle) return {oracle.probs().begin(), oracle.probs().end()};
  return pipeline.RankWeights(ParseEstimatorMethod(estimator));
}

struct RepeatOutcome {
  std::vector<double> errors;  // [estimator][kind], flattened
  std::vector<int> skipped;
  double mean_sample_size = 0.0;
};

int WorkerCount(int requested, int jobs) {
  int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  return std::clamp(n, 1, jobs);
}

// Runs fn(i) for i in [0, jobs) on a small thread pool; rethrows the first
// failure after all workers stop.
template <typename Fn>
void ParallelFor(int jobs, int threads, Fn&& fn) {
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int i = next++; i < jobs; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = jobs;
      }
    }
  };
  const int n = WorkerCount(threads, jobs);
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

ExperimentReport RunExperiment(const ExperimentConfig& cfg) { return RunExperiment(cfg, ExperimentPopulation(cfg)); }

ExperimentReport RunExperiment(const ExperimentConfig& cfg, const GlobalRankSet& population) {
  cfg.Validate();
  if (population.n_items() != cfg.n_items) throw Error(ErrorCode::kSizeMismatch, "population N differs from config");
  std::vector<std::string> estimators;
  for (const auto& e : cfg.estimators) estimators.push_back(CanonicalEstimator(e));
  const std::size_t n_est = estimators.size();
  const std::size_t n_kind = cfg.metric_kinds.size();

  const RankPmf oracle = EmpiricalPmf(population);
  std::vector<std::vector<double>> truth;
  for (MetricKind kind : cfg.metric_kinds) {
    auto curve = MetricCurve(population, kind, cfg.k_hi);
    truth.emplace_back(curve.begin() + (cfg.k_lo - 1), curve.end());
  }
  const EstimateOptions opts = OptionsFor(cfg);

  std::vector<RepeatOutcome> outcomes(static_cast<std::size_t>(cfg.repeats));
  ParallelFor(cfg.repeats, cfg.threads, [&](int rep) {
    const auto samples = DrawSamples(cfg, population, RepeatSeed(cfg, rep));
    RepeatOutcome& out = outcomes[static_cast<std::size_t>(rep)];
    out.errors.resize(n_est * n_kind);
    out.skipped.resize(n_est * n_kind);
    double size_total = 0.0;
    for (const auto& o : samples.observations()) size_total += o.sample_size;
    out.mean_sample_size = size_total / static_cast<double>(samples.size());

    EstimatorPipeline pipeline(samples, opts);
    for (std::size_t e = 0; e < n_est; ++e) {
      const auto weights = RankWeightsFor(estimators[e], pipeline, oracle);
      for (std::size_t k = 0; k < n_kind; ++k) {
        const auto curve = MetricCurveFromWeights(weights, cfg.metric_kinds[k], cfg.k_hi);
        const std::vector<double> est(curve.begin() + (cfg.k_lo - 1), curve.end());
        const auto summary = AverageRelativeError(est, truth[k]);
        out.errors[e * n_kind + k] = summary.mean;
        out.skipped[e * n_kind + k] = summary.skipped;
      }
    }
  });

  double size_mean = 0.0;
  for (const auto& o : outcomes) size_mean += o.mean_sample_size;
  size_mean /= static_cast<double>(cfg.repeats);

  ExperimentReport report;
  for (std::size_t e = 0; e < n_est; ++e) {
    for (std::size_t k = 0; k < n_kind; ++k) {
      ReportRow row;
      row.estimator = estimators[e];
      row.metric = cfg.metric_kinds[k];
      row.mean_sample_size = size_mean;
      row.skipped_k = outcomes.front().skipped[e * n_kind + k];
      for (const auto& o : outcomes) row.per_repeat.push_back(o.errors[e * n_kind + k]);
      double total = 0.0;
      for (double v : row.per_repeat) total += v;
      row.mean_rel_err = total / static_cast<double>(row.per_repeat.size());
      if (row.per_repeat.size() > 1) {
        double ss = 0.0;
        for (double v : row.per_repeat) ss += (v - row.mean_rel_err) * (v - row.mean_rel_err);
        row.std_rel_err = std::sqrt(ss / static_cast<double>(row.per_repeat.size() - 1));
      }
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

void WriteReport(std::ostream& out, const ExperimentReport& report) {
  out << "estimator,metric,mean_rel_err_pct,std_rel_err_pct,mean_sample_size\n";
  char buf[160];
  for (const auto& row : report.rows) {
    std::snprintf(buf, sizeof(buf), "%s,%s,%.6f,%.6f,%.4f\n", row.estimator.c_str(),
                  std::string(MetricKindName(row.metric)).c_str(), 100.0 * row.mean_rel_err,
                  100.0 * row.std_rel_err, row.mean_sample_size);
    out << buf;
  }
}

std::vector<WinnerAccuracy> ComputeWinnerAccuracy(const std::vector<GlobalRankSet>& populations,
                                                  const ExperimentConfig& cfg, const MetricSpec& spec) {
  if (populations.size() < 2) throw Error(ErrorCode::kInvalidArgument, "winner accuracy needs >= 2 populations");
  for (const auto& p : populations) {
    if (p.n_items() != populations.front().n_items()) {
      throw Error(ErrorCode::kSizeMismatch, "populations must share N");
    }
  }
  const auto argmax = [](const std::vector<double>& v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (v[i] > v[best]) best = i;
    }
    return best;
  };
  std::vector<double> truth;
  std::vector<RankPmf> oracles;
  for (const auto& p : populations) {
    truth.push_back(GlobalMetric(p, spec));
    oracles.push_back(EmpiricalPmf(p));
  }
  const std::size_t true_best = argmax(truth);
  std::vector<std::string> estimators;
  for (const auto& e : cfg.estimators) estimators.push_back(CanonicalEstimator(e));
  const EstimateOptions opts = OptionsFor(cfg);

  std::vector<std::vector<char>> hits(static_cast<std::size_t>(cfg.repeats),
                                      std::vector<char>(estimators.size(), 0));
  ParallelFor(cfg.repeats, cfg.threads, [&](int rep) {
    std::vector<std::vector<double>> estimates(estimators.size(), std::vector<double>(populations.size()));
    for (std::size_t p = 0; p < populations.size(); ++p) {
      const auto seed = DeriveSeed(RepeatSeed(cfg, rep), StreamTag::kRepeat, p);
      const auto samples = DrawSamples(cfg, populations[p], seed);
      EstimatorPipeline pipeline(samples, opts);
      for (std::size_t e = 0; e < estimators.size(); ++e) {
        const auto weights = RankWeightsFor(estimators[e], pipeline, oracles[p]);
        estimates[e][p] = MetricCurveFromWeights(weights, spec.kind(), spec.cutoff()).back();
      }
    }
    for (std::size_t e = 0; e < estimators.size(); ++e) {
      hits[static_cast<std::size_t>(rep)][e] = argmax(estimates[e]) == true_best ? 1 : 0;
    }
  });

  std::vector<WinnerAccuracy> out;
  for (std::size_t e = 0; e < estimators.size(); ++e) {
    int count = 0;
    for (const auto& h : hits) count += h[e];
    out.push_back({estimators[e], static_cast<double>(count) / cfg.repeats});
  }
  return out;
}

VarianceCheck MultinomialVarianceCheck(const std::vector<double>& weights, const std::vector<double>& theta,
                                       int n_trials, int draws, std::uint64_t seed) {
  if (weights.size() != theta.size() || weights.empty()) {
    throw Error(ErrorCode::kSizeMismatch, "weights and theta must have equal, nonzero length");
  }
  if (n_trials < 1) throw Error(ErrorCode::kInvalidArgument, "M must be >= 1");
  if (draws < 1000) throw Error(ErrorCode::kInvalidArgument, "draws must be >= 1000");
  const RankPmf pmf = RankPmf::FromProbabilities(theta);

  double first = 0.0;
  double second = 0.0;
  double w_max = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    first += weights[i] * theta[i];
    second += weights[i] * weights[i] * theta[i];
    w_max = std::max(w_max, std::abs(weights[i]));
  }
  VarianceCheck out;
  out.analytic_var = std::max(0.0, n_trials * (second - first * first));

  double mean = 0.0;
  double m2 = 0.0;
  for (int d = 0; d < draws; ++d) {
    auto rng = MakeStream(seed, StreamTag::kMultinomial, static_cast<std::uint64_t>(d));
    int remaining = n_trials;
    double mass = 1.0;
    double total = 0.0;
    for (std::size_t i = 0; i < weights.size() && remaining > 0; ++i) {
      int x = remaining;
      if (i + 1 < weights.size()) {
        const double p = mass > 0.0 ? std::clamp(pmf.probs()[i] / mass, 0.0, 1.0) : 1.0;
        x = p >= 1.0 ? remaining : std::binomial_distribution<int>(remaining, p)(rng);
      }
      total += weights[i] * x;
      remaining -= x;
      mass -= pmf.probs()[i];
    }
    // Welford update.
    const double delta = total - mean;
    mean += delta / (d + 1);
    m2 += delta * (total - mean);
  }
  out.empirical_var = m2 / (draws - 1);

  const double noise_floor = 1e-12 * (n_trials * w_max) * (n_trials * w_max);
  if (out.analytic_var <= noise_floor) {
    out.z_score = out.empirical_var <= noise_floor ? 0.0 : std::numeric_limits<double>::infinity();
  } else {
    const double se = out.analytic_var * std::sqrt(2.0 / (draws - 1));
    out.z_score = (out.empirical_var - out.analytic_var) / se;
  }
  return out;
}

}  // namespace rankest
