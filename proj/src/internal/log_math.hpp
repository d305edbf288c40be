#pragma once

#include <cmath>
#include <limits>
#include <numbers>

namespace rankest::internal {

// Reentrant log-gamma; std::lgamma writes the global signgam on glibc.
inline double LogGamma(double x) {
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

inline double LogChoose(double n, double k) {
  return LogGamma(n + 1.0) - LogGamma(k + 1.0) - LogGamma(n - k + 1.0);
}

// log(n!) - [(n + 1/2) log n - n + log sqrt(2 pi)], for n >= 1.
inline double StirlingError(double n) {
  constexpr double s0 = 1.0 / 12.0, s1 = 1.0 / 360.0, s2 = 1.0 / 1260.0, s3 = 1.0 / 1680.0, s4 = 1.0 / 1188.0;
  if (n <= 15.0) return LogGamma(n + 1.0) - (n + 0.5) * std::log(n) + n - 0.5 * std::log(2.0 * std::numbers::pi);
  const double nn = n * n;
  if (n > 500.0) return (s0 - s1 / nn) / n;
  if (n > 80.0) return (s0 - (s1 - s2 / nn) / nn) / n;
  if (n > 35.0) return (s0 - (s1 - (s2 - s3 / nn) / nn) / nn) / n;
  return (s0 - (s1 - (s2 - (s3 - s4 / nn) / nn) / nn) / nn) / n;
}

// x log(x / np) + np - x without cancellation when x is close to np.
inline double Deviance(double x, double np) {
  if (std::abs(x - np) < 0.1 * (x + np)) {
    double v = (x - np) / (x + np);
    double s = (x - np) * v;
    double ej = 2.0 * x * v;
    v *= v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v;
      const double next = s + ej / (2 * j + 1);
      if (next == s) return next;
      s = next;
    }
    return s;
  }
  return x * std::log(x / np) + np - x;
}

// log Binomial(x; n, p) with q = 1 - p passed separately (saddle-point form).
inline double BinomialLogPmf(double x, double n, double p, double q) {
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  if (x < 0.0 || x > n) return kNegInf;
  if (p <= 0.0) return x == 0.0 ? 0.0 : kNegInf;
  if (q <= 0.0) return x == n ? 0.0 : kNegInf;
  if (x == 0.0) return n == 0.0 ? 0.0 : (p < 0.1 ? -Deviance(n, n * q) - n * p : n * std::log(q));
  if (x == n) return q < 0.1 ? -Deviance(n, n * p) - n * q : n * std::log(p);
  const double lc = StirlingError(n) - StirlingError(x) - StirlingError(n - x) - Deviance(x, n * p) -
                    Deviance(n - x, n * q);
  const double lf = std::log(2.0 * std::numbers::pi) + std::log(x) + std::log1p(-x / n);
  return lc - 0.5 * lf;
}

// log Pr(X = x) for X ~ Hypergeometric(good, bad, draws).
inline double HypergeometricLogPmf(double x, double good, double bad, double draws) {
  const double total = good + bad;
  const double p = draws / total;
  const double q = (total - draws) / total;
  return BinomialLogPmf(x, good, p, q) + BinomialLogPmf(draws - x, bad, p, q) -
         BinomialLogPmf(draws, total, p, q);
}

}  // namespace rankest::internal
