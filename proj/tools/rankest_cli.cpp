#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rankest/csv_io.hpp"
#include "rankest/estimators.hpp"
#include "rankest/experiment.hpp"
#include "rankest/mapping.hpp"
#include "rankest/metrics.hpp"
#include "rankest/sampling.hpp"
#include "rankest/user_sampling.hpp"

namespace {

using namespace rankest;

std::ofstream OpenOut(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path + "'");
  return out;
}

struct SampleArgs {
  std::string ranks, out, scheme = "without";
  int n_items = 0, n = 100, n0 = 100, nmax = 3200;
  std::uint64_t seed = 0;
  bool adaptive = false;
};

void RunSample(const SampleArgs& a) {
  const auto ranks = io::ReadGlobalRanksFile(a.ranks, a.n_items);
  const auto scheme = ParseSamplingScheme(a.scheme);
  const auto samples = a.adaptive ? AdaptiveSample(ranks, {a.n0, a.nmax, scheme}, a.seed)
                                  : SampleRanks(ranks, a.n, scheme, a.seed);
  auto out = OpenOut(a.out);
  io::WriteSampledRanks(out, samples);
}

struct MapArgs {
  int n_items = 0, n = 0;
  std::string kind = "boundary", out;
  double a = 1.0;
};

void RunMap(const MapArgs& a) {
  const MappingSpec spec{ParseMappingKind(a.kind), a.n_items, a.n, a.a};
  const auto f = MapCurve(spec);
  auto out = OpenOut(a.out);
  out << "k,f_k\n";
  for (std::size_t k = 0; k < f.size(); ++k) out << (k + 1) << ',' << f[k] << '\n';
}

struct EstimateArgs {
  std::string samples, method = "MLE", metric = "recall", out, prior, weight = "none", scheme = "with", emit_pmf;
  int n_items = 0, cutoff = 10;
  std::optional<int> n;
  double gamma = 0.01, eta = 0.001, c = 10.0;
};

void RunEstimate(const EstimateArgs& a) {
  const auto samples = io::ReadSampledRanksFile(a.samples, a.n_items, a.n);
  const auto method = ParseEstimatorMethod(a.method);
  const MetricSpec spec(ParseMetricKind(a.metric), a.cutoff);
  EstimateOptions opts;
  opts.gamma = a.gamma;
  opts.mes.eta = a.eta;
  opts.em.weight = ParseEmWeightKind(a.weight);
  opts.em.weight_c = a.c;
  opts.scheme = ParseSamplingScheme(a.scheme);
  if (!a.prior.empty()) opts.bv_prior = io::ReadPmfFile(a.prior);

  EstimatorPipeline pipeline(samples, opts);
  const auto curve = MetricCurveFromWeights(pipeline.RankWeights(method), spec.kind(), spec.cutoff());
  auto out = OpenOut(a.out);
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%.12g", curve.back());
  out << "method,metric,K,value\n"
      << EstimatorMethodName(method) << ',' << MetricKindName(spec.kind()) << ',' << spec.cutoff() << ',' << buf
      << '\n';
  if (!a.emit_pmf.empty()) {
    auto pmf_out = OpenOut(a.emit_pmf);
    io::WritePmf(pmf_out, pipeline.Pmf(method));
  }
}

struct UsampleArgs {
  std::string ranks, metric = "recall";
  int n_items = 0, cutoff = 10;
  std::size_t m = 1;
  std::uint64_t seed = 0;
};

void RunUsample(const UsampleArgs& a) {
  const auto ranks = io::ReadGlobalRanksFile(a.ranks, a.n_items);
  const MetricSpec spec(ParseMetricKind(a.metric), a.cutoff);
  std::printf("%.12g\n", UserSampledMetric(ranks, a.m, a.seed, spec));
}

struct PlanArgs {
  double p = 0.5, e = 0.03, conf = 0.95;
  std::optional<double> z;
  bool two_models = false;
  int bonferroni = 1;
};

void RunPlan(const PlanArgs& a) {
  if (a.z && a.bonferroni != 1) throw Error(ErrorCode::kInvalidArgument, "--z and --bonferroni are exclusive");
  const double alpha = Bonferroni(1.0 - a.conf, a.bonferroni);
  const auto conf = a.z ? ConfidenceSpec::WithCriticalValue(a.conf, *a.z) : ConfidenceSpec::At(1.0 - alpha);
  const long long m = a.two_models ? TwoModelSampleSize(a.e, conf) : MoeSampleSize(a.p, a.e, conf);
  std::printf("confidence,%.10g\nz,%.10g\nm,%lld\n", conf.level(), conf.z(), m);
}

struct CurveArgs {
  std::string ranks, samples, pmf, kind = "recall", out;
  int n_items = 0, k_max = 50;
};

void RunCurve(const CurveArgs& a) {
  const auto kind = ParseMetricKind(a.kind);
  std::vector<double> curve;
  if (!a.ranks.empty()) {
    curve = MetricCurve(io::ReadGlobalRanksFile(a.ranks, a.n_items), kind, a.k_max);
  } else if (!a.samples.empty()) {
    curve = MetricCurve(io::ReadSampledRanksFile(a.samples, a.n_items), kind, a.k_max);
  } else if (!a.pmf.empty()) {
    curve = MetricCurve(io::ReadPmfFile(a.pmf), kind, a.k_max);
  } else {
    throw Error(ErrorCode::kInvalidArgument, "one of --ranks, --samples, --pmf is required");
  }
  auto out = OpenOut(a.out);
  io::WriteCurve(out, curve);
}

void RunSimulate(const std::string& config, const std::string& out_dir) {
  const auto cfg = LoadExperimentConfig(config);
  std::filesystem::create_directories(out_dir);
  const auto population = ExperimentPopulation(cfg);
  {
    auto out = OpenOut((std::filesystem::path(out_dir) / "population.csv").string());
    io::WriteGlobalRanks(out, population);
  }
  for (int rep = 0; rep < cfg.repeats; ++rep) {
    const auto seed = RepeatSeed(cfg, rep);
    auto out = OpenOut((std::filesystem::path(out_dir) / ("samples_" + std::to_string(seed) + ".csv")).string());
    io::WriteSampledRanks(out, DrawSamples(cfg, population, seed));
  }
}

void RunCompare(const std::string& config, const std::string& report_path) {
  const auto cfg = LoadExperimentConfig(config);
  const auto report = RunExperiment(cfg);
  auto out = OpenOut(report_path);
  WriteReport(out, report);
  for (const auto& row : report.rows) {
    if (row.skipped_k > 0) {
      std::cerr << row.estimator << ' ' << MetricKindName(row.metric) << ": skipped " << row.skipped_k
                << " K with zero true metric\n";
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Top-K metric estimation from item-sampled ranks"};
  app.require_subcommand(1);

  SampleArgs sample;
  auto* cmd_sample = app.add_subcommand("sample", "Draw sampled ranks from global ranks");
  cmd_sample->add_option("--ranks", sample.ranks, "Global rank CSV")->required();
  cmd_sample->add_option("--N", sample.n_items, "Number of items")->required();
  cmd_sample->add_option("--n", sample.n, "Sample size (target included)");
  cmd_sample->add_option("--scheme", sample.scheme, "with | without");
  cmd_sample->add_option("--seed", sample.seed, "RNG seed");
  cmd_sample->add_option("--out", sample.out, "Output CSV")->required();
  cmd_sample->add_flag("--adaptive", sample.adaptive, "Adaptive doubling");
  cmd_sample->add_option("--n0", sample.n0, "Adaptive initial size");
  cmd_sample->add_option("--nmax", sample.nmax, "Adaptive terminal size");

  MapArgs map;
  auto* cmd_map = app.add_subcommand("map", "Mapping function f(k)");
  cmd_map->add_option("--N", map.n_items, "Number of items")->required();
  cmd_map->add_option("--n", map.n, "Sample size")->required();
  cmd_map->add_option("--kind", map.kind, "baseline | boundary | beta | linear");
  cmd_map->add_option("--a", map.a, "Beta shape");
  cmd_map->add_option("--out", map.out, "Output CSV")->required();

  EstimateArgs est;
  auto* cmd_est = app.add_subcommand("estimate", "Estimate a global metric from sampled ranks");
  cmd_est->add_option("--samples", est.samples, "Sampled rank CSV")->required();
  cmd_est->add_option("--N", est.n_items, "Number of items")->required();
  cmd_est->add_option("--n", est.n, "Sample size for two-column files");
  cmd_est->add_option("--method", est.method, "MLE, MES, BV, BV_MLE, BV_MES, MN_MLE, MN_MES, ADAPTIVE_MLE");
  cmd_est->add_option("--metric", est.metric, "recall | ndcg | ap");
  cmd_est->add_option("--K", est.cutoff, "Cutoff");
  cmd_est->add_option("--gamma", est.gamma, "BV trade-off");
  cmd_est->add_option("--eta", est.eta, "MES entropy weight");
  cmd_est->add_option("--prior", est.prior, "Prior pmf CSV for BV");
  cmd_est->add_option("--weight", est.weight, "none | ap | ndcg");
  cmd_est->add_option("--C", est.c, "Weighted-MLE constant");
  cmd_est->add_option("--scheme", est.scheme, "Conditional model: with | without");
  cmd_est->add_option("--out", est.out, "Output CSV")->required();
  cmd_est->add_option("--emit-pmf", est.emit_pmf, "Write the estimated rank pmf");

  UsampleArgs us;
  auto* cmd_us = app.add_subcommand("usample", "Metric over a random user subset");
  cmd_us->add_option("--ranks", us.ranks, "Global rank CSV")->required();
  cmd_us->add_option("--N", us.n_items, "Number of items")->required();
  cmd_us->add_option("--m", us.m, "Subset size")->required();
  cmd_us->add_option("--seed", us.seed, "RNG seed");
  cmd_us->add_option("--metric", us.metric, "recall | ndcg | ap");
  cmd_us->add_option("--K", us.cutoff, "Cutoff");

  PlanArgs plan;
  auto* cmd_plan = app.add_subcommand("plan", "User sample size");
  cmd_plan->add_option("--p", plan.p, "Expected proportion");
  cmd_plan->add_option("--e", plan.e, "Margin of error");
  cmd_plan->add_option("--conf", plan.conf, "Confidence level");
  cmd_plan->add_option("--z", plan.z, "Explicit critical value");
  cmd_plan->add_flag("--two-models", plan.two_models, "Size for comparing two models");
  cmd_plan->add_option("--bonferroni", plan.bonferroni, "Number of comparisons");

  std::string sim_config, sim_dir;
  auto* cmd_sim = app.add_subcommand("simulate", "Write a synthetic population and its samples");
  cmd_sim->add_option("--config", sim_config, "Experiment JSON")->required();
  cmd_sim->add_option("--out-dir", sim_dir, "Output directory")->required();

  std::string cmp_config, cmp_report;
  auto* cmd_cmp = app.add_subcommand("compare", "Repeated-seed estimator comparison");
  cmd_cmp->add_option("--config", cmp_config, "Experiment JSON")->required();
  cmd_cmp->add_option("--report", cmp_report, "Report CSV")->required();

  CurveArgs curve;
  auto* cmd_curve = app.add_subcommand("curve", "Metric curve for K = 1..kmax");
  cmd_curve->add_option("--ranks", curve.ranks, "Global rank CSV");
  cmd_curve->add_option("--samples", curve.samples, "Sampled rank CSV");
  cmd_curve->add_option("--pmf", curve.pmf, "Pmf CSV");
  cmd_curve->add_option("--N", curve.n_items, "Number of items");
  cmd_curve->add_option("--kind", curve.kind, "recall | ndcg | ap");
  cmd_curve->add_option("--kmax", curve.k_max, "Largest K");
  cmd_curve->add_option("--out", curve.out, "Output CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cmd_sample) RunSample(sample);
    if (*cmd_map) RunMap(map);
    if (*cmd_est) RunEstimate(est);
    if (*cmd_us) RunUsample(us);
    if (*cmd_plan) RunPlan(plan);
    if (*cmd_sim) RunSimulate(sim_config, sim_dir);
    if (*cmd_cmp) RunCompare(cmp_config, cmp_report);
    if (*cmd_curve) RunCurve(curve);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
