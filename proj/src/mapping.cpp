#include "rankest/mapping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "internal/log_math.hpp"
#include "rankest/metrics.hpp"
#include "rankest/population.hpp"

namespace rankest {

std::string_view MappingKindName(MappingKind kind) {
  switch (kind) {
    case MappingKind::kBaseline: return "baseline";
    case MappingKind::kBoundary: return "boundary";
    case MappingKind::kBetaRecurrence: return "beta";
    case MappingKind::kLinear: return "linear";
  }
  return "unknown";
}

MappingKind ParseMappingKind(std::string_view name) {
  if (name == "baseline") return MappingKind::kBaseline;
  if (name == "boundary" || name == "bound") return MappingKind::kBoundary;
  if (name == "beta") return MappingKind::kBetaRecurrence;
  if (name == "linear") return MappingKind::kLinear;
  throw Error(ErrorCode::kParse, "unknown mapping kind '" + std::string(name) + "'");
}

void MappingSpec::Validate() const {
  if (sample_size < 2 || n_items < sample_size || n_items > kMaxItems) {
    throw Error(ErrorCode::kInvalidArgument, "mapping needs 2 <= n <= N");
  }
  if (kind == MappingKind::kBetaRecurrence && !(a > 0.0 && std::isfinite(a))) {
    throw Error(ErrorCode::kInvalidArgument, "beta shape a must be > 0");
  }
}

namespace {

std::vector<double> BetaRecurrenceValues(double a, int n_items, int n) {
  using internal::LogGamma;
  std::vector<double> f(static_cast<std::size_t>(n));
  // S is kept divided by (N-1)^a, so it stays in [0, 1].
  const double base = std::log(a) + LogGamma(n) - LogGamma(n + a);
  double s = 0.0;
  for (int k = 0; k < n; ++k) {
    s += std::exp(base + LogGamma(k + a) - LogGamma(k + 1.0));
    f[static_cast<std::size_t>(k)] = (n_items - 1) * std::pow(std::max(s, 0.0), 1.0 / a) + 1.0;
  }
  return f;
}

}  // namespace

std::vector<double> MapValues(const MappingSpec& spec) {
  spec.Validate();
  const int n = spec.sample_size;
  const double big = spec.n_items - 1.0;
  if (spec.kind == MappingKind::kBetaRecurrence) return BetaRecurrenceValues(spec.a, spec.n_items, n);
  std::vector<double> f(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) {
    double v = 0.0;
    switch (spec.kind) {
      case MappingKind::kBaseline: v = (k - 1.0) / (n - 1.0) * big + 1.0; break;
      case MappingKind::kBoundary: v = (k - 0.5) * big / (n - 1.0) + 0.5; break;
      case MappingKind::kLinear: v = k * big / n + 1.0; break;
      case MappingKind::kBetaRecurrence: break;
    }
    f[static_cast<std::size_t>(k - 1)] = v;
  }
  return f;
}

namespace {

int RoundAndClamp(const MappingSpec& spec, double v) {
  const double r = spec.kind == MappingKind::kBoundary ? std::floor(v) : std::nearbyint(v);
  return static_cast<int>(std::clamp(r, 1.0, static_cast<double>(spec.n_items)));
}

}  // namespace

int MapK(const MappingSpec& spec, int k) {
  if (k < 1 || k > spec.sample_size) throw Error(ErrorCode::kInvalidArgument, "k must be in [1, n]");
  return RoundAndClamp(spec, MapValues(spec)[static_cast<std::size_t>(k - 1)]);
}

std::vector<int> MapCurve(const MappingSpec& spec) {
  const auto values = MapValues(spec);
  std::vector<int> out(values.size());
  std::transform(values.begin(), values.end(), out.begin(), [&](double v) { return RoundAndClamp(spec, v); });
  return out;
}

AlignmentError AlignError(const GlobalRankSet& global, const SampledRankSet& samples, const MappingSpec& spec,
                          int k_lo, int k_hi) {
  spec.Validate();
  if (global.n_items() != spec.n_items || samples.n_items() != spec.n_items) {
    throw Error(ErrorCode::kSizeMismatch, "catalogue size differs from mapping spec");
  }
  if (!samples.is_fixed_size() || samples.sample_size() != spec.sample_size) {
    throw Error(ErrorCode::kSizeMismatch, "samples are not fixed-size n=" + std::to_string(spec.sample_size));
  }
  if (k_lo < 1 || k_hi < k_lo || k_hi > spec.sample_size) {
    throw Error(ErrorCode::kInvalidArgument, "k range must lie in [1, n]");
  }
  const auto sampled = MetricCurve(samples, MetricKind::kRecall, spec.sample_size);
  const auto truth = MetricCurve(global, MetricKind::kRecall, spec.n_items);
  const auto f = MapCurve(spec);
  AlignmentError out;
  for (int k = k_lo; k <= k_hi; ++k) {
    const double t = truth[static_cast<std::size_t>(f[static_cast<std::size_t>(k - 1)] - 1)];
    out.per_k.push_back(std::abs(sampled[static_cast<std::size_t>(k - 1)] - t));
  }
  double total = 0.0;
  for (double e : out.per_k) total += e;
  out.mean = total / static_cast<double>(out.per_k.size());
  return out;
}

std::vector<double> BetaRelativeGap(double a, int n_items, int sample_size) {
  const auto fa = MapValues({MappingKind::kBetaRecurrence, n_items, sample_size, a});
  const auto f1 = MapValues({MappingKind::kBetaRecurrence, n_items, sample_size, 1.0});
  std::vector<double> gap(fa.size());
  for (std::size_t i = 0; i < fa.size(); ++i) gap[i] = std::abs(fa[i] - f1[i]) / f1[i];
  return gap;
}

double FitBetaShape(const RankPmf& empirical) {
  double best_a = 0.1;
  double best_err = std::numeric_limits<double>::infinity();
  for (int step = 1; step <= 10; ++step) {
    const double a = step / 10.0;
    const auto model = SynthRankPmf(a, empirical.n_items());
    double err = 0.0;
    for (int R = 1; R <= empirical.n_items(); ++R) {
      const double d = model(R) - empirical(R);
      err += d * d;
    }
    if (err < best_err) {
      best_err = err;
      best_a = a;
    }
  }
  return best_a;
}

}  // namespace rankest
