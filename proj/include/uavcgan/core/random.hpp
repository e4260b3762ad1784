#pragma once

#include <cstdint>
#include <random>

namespace uavcgan {

/// SplitMix64 finalizer; used to derive independent stream seeds and to hash inputs into seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t value) noexcept {
  return splitmix64(seed ^ splitmix64(value));
}

using Rng = std::mt19937_64;

/// One reproducible random stream per (seed, stream id) pair.
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream_id) {
  return Rng(mix_seed(seed, stream_id + 0x5157ULL));
}

inline double standard_normal(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

inline bool bernoulli(Rng& rng, double p) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return uniform01(rng) < p;
}

}  // namespace uavcgan
