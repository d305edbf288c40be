#include "rankest/population.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "rankest/rng.hpp"

namespace rankest {

RankPmf SynthRankPmf(double a, int n_items) {
  if (!(a > 0.0) || !std::isfinite(a)) throw Error(ErrorCode::kInvalidArgument, "beta shape a must be > 0");
  if (n_items < 1 || n_items > kMaxItems) {
    throw Error(ErrorCode::kInvalidArgument, "n_items out of range: " + std::to_string(n_items));
  }
  if (n_items == 1) return RankPmf::PointMass(1, 1);
  const double width = 1.0 / static_cast<double>(n_items - 1);
  std::vector<double> weights(static_cast<std::size_t>(n_items));
  if (a < 1.0) {
    weights[0] = std::pow(width, a) / a;
  } else {
    weights[0] = a == 1.0 ? width : 0.0;
  }
  for (int R = 2; R <= n_items; ++R) {
    weights[static_cast<std::size_t>(R - 1)] = std::pow((R - 1) * width, a - 1.0) * width;
  }
  return RankPmf::FromWeights(std::move(weights));
}

GlobalRankSet DrawPopulation(const RankPmf& pmf, std::size_t n_users, std::uint64_t seed) {
  if (n_users < 1) throw Error(ErrorCode::kEmptySet, "population needs at least one user");
  std::vector<double> cdf(static_cast<std::size_t>(pmf.n_items()));
  double running = 0.0;
  for (int R = 1; R <= pmf.n_items(); ++R) {
    running += pmf(R);
    cdf[static_cast<std::size_t>(R - 1)] = running;
  }
  const double top = cdf.back();
  std::vector<int> ranks(n_users);
  for (std::size_t u = 0; u < n_users; ++u) {
    auto rng = MakeStream(seed, StreamTag::kPopulation, u);
    const double x = UniformUnit(rng) * top;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), x);
    const auto idx = std::min<std::ptrdiff_t>(it - cdf.begin(), pmf.n_items() - 1);
    ranks[u] = static_cast<int>(idx) + 1;
  }
  return GlobalRankSet(pmf.n_items(), std::move(ranks));
}

}  // namespace rankest
