#pragma once

#include <cstdint>
#include <limits>

namespace rankest {

// SplitMix64: a 64-bit splittable generator. Streams are derived from
// (seed, index) pairs so that per-user draws do not depend on the order in
// which users are processed.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t state) : state_(state) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return Mix(state_);
  }

  static constexpr std::uint64_t Mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

// Stream tags keep e.g. population draws and rank sampling independent even
// when they share a seed.
enum class StreamTag : std::uint64_t {
  kPopulation = 1,
  kItemSampling = 2,
  kAdaptiveSampling = 3,
  kUserSubset = 4,
  kRepeat = 5,
  kMultinomial = 6,
};

inline std::uint64_t DeriveSeed(std::uint64_t seed, StreamTag tag, std::uint64_t index) {
  std::uint64_t s = SplitMix64::Mix(seed + 0x9e3779b97f4a7c15ULL);
  s = SplitMix64::Mix(s ^ (static_cast<std::uint64_t>(tag) * 0xd1b54a32d192ed03ULL));
  return SplitMix64::Mix(s ^ (index + 0x632be59bd9b4e019ULL));
}

inline SplitMix64 MakeStream(std::uint64_t seed, StreamTag tag, std::uint64_t index) {
  return SplitMix64(DeriveSeed(seed, tag, index));
}

// Uniform double in [0, 1) with 53 random bits.
inline double UniformUnit(SplitMix64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace rankest
