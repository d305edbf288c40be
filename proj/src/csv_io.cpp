#include "rankest/csv_io.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <string_view>
#include <vector>

namespace rankest::io {
namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(Trim(line.substr(start)));
      return fields;
    }
    fields.push_back(Trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

int ParseInt(std::string_view field, std::size_t line_no) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) + ": bad integer '" +
                                       std::string(field) + "'");
  }
  return value;
}

double ParseDouble(std::string_view field, std::size_t line_no) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) + ": bad number '" +
                                       std::string(field) + "'");
  }
  return value;
}

// Reads the header and returns its column names.
std::vector<std::string> ReadHeader(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kParse, "missing header line");
  std::vector<std::string> names;
  for (auto f : SplitFields(line)) names.emplace_back(f);
  return names;
}

void ExpectHeader(const std::vector<std::string>& got, const std::vector<std::string>& want) {
  if (got != want) {
    std::string w;
    for (const auto& s : want) w += (w.empty() ? "" : ",") + s;
    throw Error(ErrorCode::kParse, "expected header '" + w + "'");
  }
}

template <typename RowFn>
void ForEachRow(std::istream& in, std::size_t n_fields, RowFn&& fn) {
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    const auto fields = SplitFields(line);
    if (fields.size() != n_fields) {
      throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) + ": expected " +
                                         std::to_string(n_fields) + " fields");
    }
    fn(fields, line_no);
  }
}

std::ifstream OpenOrThrow(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  return in;
}

}  // namespace

void WriteGlobalRanks(std::ostream& out, const GlobalRankSet& ranks) {
  out << "user_id,rank\n";
  std::size_t u = 0;
  for (int r : ranks.ranks()) out << u++ << ',' << r << '\n';
}

GlobalRankSet ReadGlobalRanks(std::istream& in, int n_items) {
  ExpectHeader(ReadHeader(in), {"user_id", "rank"});
  std::vector<int> ranks;
  ForEachRow(in, 2, [&](const auto& f, std::size_t line_no) { ranks.push_back(ParseInt(f[1], line_no)); });
  return GlobalRankSet(n_items, std::move(ranks));
}

void WriteSampledRanks(std::ostream& out, const SampledRankSet& samples) {
  out << "user_id,rank,sample_size\n";
  std::size_t u = 0;
  for (const auto& o : samples.observations()) out << u++ << ',' << o.rank << ',' << o.sample_size << '\n';
}

SampledRankSet ReadSampledRanks(std::istream& in, int n_items, std::optional<int> sample_size) {
  const auto header = ReadHeader(in);
  std::vector<SampledObservation> obs;
  if (header.size() == 2) {
    ExpectHeader(header, {"user_id", "rank"});
    if (!sample_size) {
      throw Error(ErrorCode::kParse, "two-column sampled file needs an explicit sample size");
    }
    ForEachRow(in, 2, [&](const auto& f, std::size_t line_no) {
      obs.push_back({ParseInt(f[1], line_no), *sample_size});
    });
  } else {
    ExpectHeader(header, {"user_id", "rank", "sample_size"});
    ForEachRow(in, 3, [&](const auto& f, std::size_t line_no) {
      obs.push_back({ParseInt(f[1], line_no), ParseInt(f[2], line_no)});
    });
  }
  return SampledRankSet(n_items, std::move(obs));
}

void WritePmf(std::ostream& out, const RankPmf& pmf) {
  out << "rank,prob\n";
  const auto old_precision = out.precision(17);
  for (int r = 1; r <= pmf.n_items(); ++r) out << r << ',' << pmf(r) << '\n';
  out.precision(old_precision);
}

RankPmf ReadPmf(std::istream& in) {
  ExpectHeader(ReadHeader(in), {"rank", "prob"});
  std::vector<double> probs;
  ForEachRow(in, 2, [&](const auto& f, std::size_t line_no) {
    const int rank = ParseInt(f[0], line_no);
    if (rank != static_cast<int>(probs.size()) + 1) {
      throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) + ": ranks must be 1..N in order");
    }
    probs.push_back(ParseDouble(f[1], line_no));
  });
  return RankPmf::FromProbabilities(std::move(probs));
}

void WriteCurve(std::ostream& out, std::span<const double> values) {
  out << "K,value\n";
  const auto old_precision = out.precision(17);
  for (std::size_t k = 0; k < values.size(); ++k) out << (k + 1) << ',' << values[k] << '\n';
  out.precision(old_precision);
}

GlobalRankSet ReadGlobalRanksFile(const std::string& path, int n_items) {
  auto in = OpenOrThrow(path);
  return ReadGlobalRanks(in, n_items);
}

SampledRankSet ReadSampledRanksFile(const std::string& path, int n_items, std::optional<int> sample_size) {
  auto in = OpenOrThrow(path);
  return ReadSampledRanks(in, n_items, sample_size);
}

RankPmf ReadPmfFile(const std::string& path) {
  auto in = OpenOrThrow(path);
  return ReadPmf(in);
}

}  // namespace rankest::io
