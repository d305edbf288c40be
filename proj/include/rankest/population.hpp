#pragma once

#include <cstdint>

#include "rankest/core_types.hpp"

namespace rankest {

// Discretized Beta(a, 1) over ranks: weight ((R-1)/(N-1))^(a-1) / (N-1) for
// R >= 2. For a < 1 the density diverges at 0, so the R = 1 cell gets the
// integral of x^(a-1) over [0, 1/(N-1)], i.e. (1/(N-1))^a / a.
RankPmf SynthRankPmf(double a, int n_items);

// M i.i.d. ranks from pmf by inverse CDF; user u draws from its own stream.
GlobalRankSet DrawPopulation(const RankPmf& pmf, std::size_t n_users, std::uint64_t seed);

}  // namespace rankest
