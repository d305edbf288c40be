// Acceptance checks 1-11. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails. All seeds are fixed.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "rankest/estimators.hpp"
#include "rankest/experiment.hpp"
#include "rankest/mapping.hpp"
#include "rankest/metrics.hpp"
#include "rankest/population.hpp"
#include "rankest/sampling.hpp"
#include "rankest/user_sampling.hpp"

namespace {

using namespace rankest;
using testing_oracles::ConditionalTable;
using testing_oracles::MinimizeMnLoss;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

std::vector<double> RandomSimplex(std::mt19937_64& gen, int n, double floor = 0.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> w(static_cast<std::size_t>(n));
  double total = 0.0;
  for (double& x : w) total += (x = floor + u(gen));
  for (double& x : w) x /= total;
  return w;
}

double TotalVariation(std::span<const double> a, std::span<const double> b) {
  double tv = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) tv += std::abs(a[i] - b[i]);
  return 0.5 * tv;
}

Outcome Criterion1() {
  const auto conf = ConfidenceSpec::At(0.95);
  const long long m3 = MoeSampleSize(0.5, 0.03, conf);
  const long long m1 = MoeSampleSize(0.5, 0.01, conf);
  const double h1 = HoeffdingProb(30000, 0.01);
  const double h2 = HoeffdingProb(10000, 0.02);
  const bool pass = m3 == 1067 && m1 == 9604 && h1 <= 0.005 && h2 < 1e-3;
  return {pass, Fmt("m(0.03)=%lld m(0.01)=%lld hoeffding(30000,0.01)=%.6g hoeffding(10000,0.02)=%.6g", m3, m1,
                    h1, h2)};
}

Outcome Criterion2() {
  double worst_end = 0.0;
  double worst_linear = 0.0;
  for (double a : {0.2, 0.5, 1.0, 2.0}) {
    for (int n_items : {101, 1001, 25815}) {
      for (int n : {10, 100}) {
        const auto f = MapValues({MappingKind::kBetaRecurrence, n_items, n, a});
        worst_end = std::max(worst_end, std::abs(f.back() - n_items) / n_items);
        if (a == 1.0) {
          const auto lin = MapValues({MappingKind::kLinear, n_items, n, 1.0});
          for (int k = 0; k < n; ++k) worst_linear = std::max(worst_linear, std::abs(f[k] - lin[k]) / lin[k]);
        }
      }
    }
  }
  return {worst_end <= 1e-6 && worst_linear <= 1e-6,
          Fmt("max rel |f(n)-N|/N=%.3g, max rel gap to linear at a=1: %.3g", worst_end, worst_linear)};
}

Outcome Criterion3() {
  // Fixed population of M users; 1000 independent item-sampling rounds give
  // 10^6 sampled users. The formulas condition on the population pmf.
  std::mt19937_64 gen(3003);
  constexpr std::size_t kUsers = 1000;
  constexpr int kRounds = 1000;
  int mean_fail = 0;
  int var_fail = 0;
  double worst_mean = 0.0, worst_var = 0.0;
  for (int c = 0; c < 20; ++c) {
    const int n_items = std::uniform_int_distribution<int>(100, 2000)(gen);
    const double a = std::uniform_real_distribution<double>(0.2, 1.5)(gen);
    const int n = std::uniform_int_distribution<int>(5, 50)(gen);
    const int k = std::uniform_int_distribution<int>(1, n - 1)(gen);
    const auto scheme = c % 2 == 0 ? SamplingScheme::kWithReplacement : SamplingScheme::kWithoutReplacement;
    const auto pop = DrawPopulation(SynthRankPmf(a, n_items), kUsers, 100 + c);
    const auto moments = ExpectedSampledRecall(EmpiricalPmf(pop), n, k, scheme);
    const MetricSpec spec(MetricKind::kRecall, k);
    std::vector<double> round_means;
    for (int s = 0; s < kRounds; ++s) {
      round_means.push_back(SampledMetric(SampleRanks(pop, n, scheme, 1'000'000ULL * c + s), spec));
    }
    double grand = 0.0;
    for (double v : round_means) grand += v;
    grand /= kRounds;
    double ss = 0.0;
    for (double v : round_means) ss += (v - grand) * (v - grand);
    const double emp_var = ss / (kRounds - 1);
    const double var = moments.Variance(kUsers);
    const double mean_z = std::abs(grand - moments.mean) / std::sqrt(var / kRounds);
    const double var_z = std::abs(emp_var - var) / (var * std::sqrt(2.0 / (kRounds - 1)));
    worst_mean = std::max(worst_mean, mean_z);
    worst_var = std::max(worst_var, var_z);
    mean_fail += mean_z > 3.0;
    var_fail += var_z > 3.0;
  }
  return {mean_fail == 0 && var_fail == 0,
          Fmt("20 cases x 1e6 users: mean max |z|=%.2f (%d > 3), variance max |z|=%.2f (%d > 3)", worst_mean,
              mean_fail, worst_var, var_fail)};
}

Outcome Criterion4() {
  std::mt19937_64 gen(4004);
  constexpr int kItems = 500;
  int violations = 0;
  double min_gap = std::numeric_limits<double>::infinity();
  for (int pair = 0; pair < 50; ++pair) {
    // Pointwise max / min of two random CDFs gives a dominated pair.
    const auto a = RandomSimplex(gen, kItems);
    const auto b = RandomSimplex(gen, kItems);
    std::vector<double> hi(kItems), lo(kItems);
    double ca = 0.0, cb = 0.0, prev_hi = 0.0, prev_lo = 0.0;
    for (int R = 0; R < kItems; ++R) {
      ca += a[R];
      cb += b[R];
      const double h = R + 1 == kItems ? 1.0 : std::max(ca, cb);
      const double l = R + 1 == kItems ? 1.0 : std::min(ca, cb);
      hi[R] = std::max(0.0, h - prev_hi);
      lo[R] = std::max(0.0, l - prev_lo);
      prev_hi = h;
      prev_lo = l;
    }
    const auto better = RankPmf::FromWeights(hi);
    const auto worse = RankPmf::FromWeights(lo);
    for (int n : {20, 100}) {
      const auto scheme = pair % 2 == 0 ? SamplingScheme::kWithReplacement : SamplingScheme::kWithoutReplacement;
      const auto cb_curve = ExpectedSampledRecallCurve(better, n, scheme);
      const auto cw_curve = ExpectedSampledRecallCurve(worse, n, scheme);
      for (int k = 0; k < n; ++k) {
        const double gap = cb_curve[k] - cw_curve[k];
        min_gap = std::min(min_gap, gap);
        violations += gap < -1e-12;
      }
    }
  }
  return {violations == 0, Fmt("50 pairs x n in {20,100}: %d violations, min gap %.3g", violations, min_gap)};
}

Outcome Criterion5() {
  std::mt19937_64 gen(5005);
  int decreases = 0;
  double worst_drop = 0.0;
  for (int run = 0; run < 100; ++run) {
    const int n_items = std::uniform_int_distribution<int>(20, 500)(gen);
    const int n = std::uniform_int_distribution<int>(2, std::min(50, n_items))(gen);
    const auto scheme = run % 2 == 0 ? SamplingScheme::kWithReplacement : SamplingScheme::kWithoutReplacement;
    const auto truth = RankPmf::FromWeights(RandomSimplex(gen, n_items));
    const auto samples = SampleRanks(DrawPopulation(truth, 1000, run), n, scheme, run);
    EmConfig cfg;
    cfg.scheme = scheme;
    cfg.weight = static_cast<EmWeightKind>(run % 3);
    const auto r = MleEm(samples, cfg);
    for (std::size_t i = 1; i < r.log_likelihood.size(); ++i) {
      const double drop = r.log_likelihood[i - 1] - r.log_likelihood[i];
      worst_drop = std::max(worst_drop, drop);
      decreases += drop > 1e-10;
    }
  }
  const auto pop = DrawPopulation(SynthRankPmf(0.5, 200), 5000, 55);
  EmConfig id_cfg;
  id_cfg.scheme = SamplingScheme::kWithoutReplacement;
  const auto id = MleEm(SampleRanks(pop, 200, SamplingScheme::kWithoutReplacement, 56), id_cfg);
  const double tv = TotalVariation(id.pmf.probs(), EmpiricalPmf(pop).probs());
  return {decreases == 0 && tv < 1e-6,
          Fmt("100 runs: %d decreases (max drop %.3g); identity TV=%.3g", decreases, worst_drop, tv)};
}

Outcome Criterion6() {
  std::mt19937_64 gen(6006);
  constexpr int kItems = 10, kSize = 5;
  double worst = 0.0;
  for (int inst = 0; inst < 20; ++inst) {
    const auto scheme = inst % 2 == 0 ? SamplingScheme::kWithReplacement : SamplingScheme::kWithoutReplacement;
    const auto prior = RankPmf::FromWeights(RandomSimplex(gen, kItems, 0.02));
    const double m = std::uniform_real_distribution<double>(5.0, 5000.0)(gen);
    const MetricSpec spec(static_cast<MetricKind>(inst % 3), 1 + inst % 6);
    const auto samples = SampleRanks(DrawPopulation(prior, 200, inst), kSize, scheme, inst);
    const auto got = MnMetric(samples, prior, m, spec, scheme).f_hat;
    std::vector<double> b(kItems);
    for (int R = 0; R < kItems; ++R) b[R] = MetricFn(spec, R + 1);
    const auto expect = MinimizeMnLoss(ConditionalTable(kItems, kSize, scheme),
                                       {prior.probs().begin(), prior.probs().end()}, b, m);
    for (int i = 0; i < kSize; ++i) worst = std::max(worst, std::abs(got[i] - expect[i]));
  }
  double id_worst = 0.0;
  const auto pop = DrawPopulation(SynthRankPmf(0.6, 12), 300, 66);
  const auto id_samples = SampleRanks(pop, 12, SamplingScheme::kWithoutReplacement, 67);
  for (auto kind : {MetricKind::kRecall, MetricKind::kNdcg, MetricKind::kAp}) {
    const MetricSpec spec(kind, 5);
    const auto r = MnMetric(id_samples, EmpiricalPmf(pop), 300.0, spec, SamplingScheme::kWithoutReplacement);
    for (int k = 1; k <= 12; ++k) id_worst = std::max(id_worst, std::abs(r.f_hat[k - 1] - MetricFn(spec, k)));
  }
  return {worst <= 1e-6 && id_worst <= 1e-10,
          Fmt("20 instances: max |x - x_min|=%.3g; identity max error %.3g", worst, id_worst)};
}

ExperimentConfig QualityConfig() {
  ExperimentConfig cfg;
  cfg.n_items = 2000;
  cfg.n_users = 25000;
  cfg.beta_a = 0.5;
  cfg.sampling.scheme = SamplingScheme::kWithoutReplacement;
  cfg.sampling.sample_size = 100;
  cfg.estimators = {"MLE", "MES", "BV", "MN_MES"};
  cfg.metric_kinds = {MetricKind::kRecall};
  cfg.k_lo = 1;
  cfg.k_hi = 50;
  cfg.repeats = 100;
  cfg.base_seed = 7;
  return cfg;
}

Outcome Criterion7(const ExperimentReport& report) {
  const auto& mle = report.Row("MLE", MetricKind::kRecall);
  const auto& mes = report.Row("MES", MetricKind::kRecall);
  const auto& bv = report.Row("BV", MetricKind::kRecall);
  const auto& mn = report.Row("MN_MES", MetricKind::kRecall);
  int mn_wins = 0;
  for (std::size_t i = 0; i < mn.per_repeat.size(); ++i) mn_wins += mn.per_repeat[i] < bv.per_repeat[i];
  const bool pass = mle.mean_rel_err <= 0.15 && mes.mean_rel_err <= 0.15 && mn_wins >= 80;
  return {pass, Fmt("MLE %.2f%% (<=15%%: %s), MES %.2f%% (<=15%%: %s), MN_MES < BV in %d/100 (BV mean %.2f%%, "
                    "MN_MES mean %.2f%%)",
                    100 * mle.mean_rel_err, mle.mean_rel_err <= 0.15 ? "yes" : "no", 100 * mes.mean_rel_err,
                    mes.mean_rel_err <= 0.15 ? "yes" : "no", mn_wins, 100 * bv.mean_rel_err,
                    100 * mn.mean_rel_err)};
}

Outcome Criterion8(const GlobalRankSet& population) {
  auto fixed = QualityConfig();
  fixed.sampling.scheme = SamplingScheme::kWithReplacement;
  fixed.estimators = {"MLE"};
  auto adaptive = fixed;
  adaptive.sampling.adaptive = AdaptiveConfig{100, 3200, SamplingScheme::kWithReplacement};
  adaptive.estimators = {"ADAPTIVE_MLE"};
  const auto fixed_row = RunExperiment(fixed, population).Row("MLE", MetricKind::kRecall);
  const auto ad_row = RunExperiment(adaptive, population).Row("ADAPTIVE_MLE", MetricKind::kRecall);
  const bool pass = ad_row.mean_rel_err <= 0.05 && ad_row.mean_sample_size <= 500.0 &&
                    ad_row.mean_rel_err < fixed_row.mean_rel_err;
  return {pass, Fmt("adaptive MLE %.2f%% at mean size %.1f; fixed n=100 MLE %.2f%%", 100 * ad_row.mean_rel_err,
                    ad_row.mean_sample_size, 100 * fixed_row.mean_rel_err)};
}

Outcome Criterion9() {
  constexpr std::size_t kUsers = 100000;
  std::vector<int> ranks(kUsers);
  for (std::size_t i = 0; i < kUsers; ++i) ranks[i] = i % 2 == 0 ? 3 : 80;
  const GlobalRankSet pop(100, std::move(ranks));
  const MetricSpec spec(MetricKind::kRecall, 10);
  const auto m = static_cast<std::size_t>(MoeSampleSize(0.5, 0.03, ConfidenceSpec::At(0.95)));
  int covered = 0;
  for (int seed = 0; seed < 1000; ++seed) covered += std::abs(UserSampledMetric(pop, m, seed, spec) - 0.5) <= 0.03;
  const double coverage = covered / 1000.0;

  bool exact = UserSampledMetric(pop, kUsers, 1, spec) == GlobalMetric(pop, spec);
  const auto beta_pop = DrawPopulation(SynthRankPmf(0.5, 1000), 20000, 99);
  for (auto kind : {MetricKind::kNdcg, MetricKind::kAp}) {
    const MetricSpec s(kind, 20);
    exact = exact && std::abs(UserSampledMetric(beta_pop, beta_pop.size(), 2, s) - GlobalMetric(beta_pop, s)) <= 1e-12;
  }
  return {coverage >= 0.94 && exact,
          Fmt("m=%zu coverage %.3f over 1000 seeds; m=M reproduces global metric: %s", m, coverage,
              exact ? "yes" : "no")};
}

Outcome Criterion10() {
  std::mt19937_64 gen(1010);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int inst = 0; inst < 20; ++inst) {
    const int k = std::uniform_int_distribution<int>(2, 30)(gen);
    std::vector<double> w(k);
    for (double& x : w) x = 4.0 * u(gen) - 2.0;
    const auto theta = RandomSimplex(gen, k, 0.01);
    const int m = std::uniform_int_distribution<int>(10, 5000)(gen);
    const auto r = MultinomialVarianceCheck(w, theta, m, 20000, 10000 + inst);
    worst = std::max(worst, std::abs(r.z_score));
  }
  return {worst < 4.0, Fmt("20 instances: max |z|=%.2f", worst)};
}

Outcome Criterion11(const ExperimentConfig& cfg, const ExperimentReport& first) {
  std::ostringstream a, b;
  WriteReport(a, first);
  WriteReport(b, RunExperiment(cfg));
  return {a.str() == b.str() && !a.str().empty(), Fmt("%zu-byte reports identical: %s", a.str().size(),
                                                      a.str() == b.str() ? "yes" : "no")};
}

bool Report(int id, const std::function<Outcome()>& check) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = check();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("[%s] criterion %d: %s (%.1fs)\n", out.pass ? "PASS" : "FAIL", id, out.detail.c_str(), secs);
  std::fflush(stdout);
  return out.pass;
}

}  // namespace

int main() {
  int failures = 0;
  failures += !Report(1, Criterion1);
  failures += !Report(2, Criterion2);
  failures += !Report(3, Criterion3);
  failures += !Report(4, Criterion4);
  failures += !Report(5, Criterion5);
  failures += !Report(6, Criterion6);

  const auto cfg = QualityConfig();
  const auto population = ExperimentPopulation(cfg);
  ExperimentReport quality;
  failures += !Report(7, [&] {
    quality = RunExperiment(cfg, population);
    return Criterion7(quality);
  });
  failures += !Report(8, [&] { return Criterion8(population); });
  failures += !Report(9, Criterion9);
  failures += !Report(10, Criterion10);
  failures += !Report(11, [&] { return Criterion11(cfg, quality); });

  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
