#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>

#include "rankest/core_types.hpp"

namespace rankest::io {

// Rank files: header `user_id,rank` (global) or `user_id,rank,sample_size`
// (sampled). Ranks are 1-based. user_id is carried through as an opaque
// string on read and written as the 0-based row index.
void WriteGlobalRanks(std::ostream& out, const GlobalRankSet& ranks);
GlobalRankSet ReadGlobalRanks(std::istream& in, int n_items);

void WriteSampledRanks(std::ostream& out, const SampledRankSet& samples);
// A two-column `user_id,rank` file is accepted when sample_size is given.
SampledRankSet ReadSampledRanks(std::istream& in, int n_items,
                                std::optional<int> sample_size = std::nullopt);

// Pmf file: `rank,prob`, ranks 1..N in order. Probabilities are written with
// 17 significant digits so a read-back compares equal.
void WritePmf(std::ostream& out, const RankPmf& pmf);
RankPmf ReadPmf(std::istream& in);

// Curve export: `K,value`, K from 1.
void WriteCurve(std::ostream& out, std::span<const double> values);

// Path helpers that open the file and raise kIo on failure.
GlobalRankSet ReadGlobalRanksFile(const std::string& path, int n_items);
SampledRankSet ReadSampledRanksFile(const std::string& path, int n_items,
                                    std::optional<int> sample_size = std::nullopt);
RankPmf ReadPmfFile(const std::string& path);

}  // namespace rankest::io
