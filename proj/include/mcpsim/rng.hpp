#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace mcpsim {

using Rng = std::mt19937_64;

// Stream identifiers for mix_seed; keep replicas of different roles apart.
enum class Stream : std::uint64_t {
  graphical = 1,
  modulated = 2,
  poisson = 3,
  init_config = 4,
  init_config_aux = 5,
};

// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed for replica `index` of `stream`; independent of execution order.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index,
                                 Stream stream) noexcept {
  return splitmix64(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(stream))) + index);
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t index, Stream stream) {
  return Rng(mix_seed(seed, index, stream));
}

// The conversions below are spelled out rather than taken from <random>
// distributions so that streams are identical across standard libraries.

// Uniform on [0,1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform index in [0, n).
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  auto i = static_cast<std::uint64_t>(uniform01(rng) * static_cast<double>(n));
  return i < n ? i : n - 1;
}

// Exponential with the given rate (> 0).
inline double exponential(Rng& rng, double rate) {
  return -std::log1p(-uniform01(rng)) / rate;
}

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

}  // namespace mcpsim
