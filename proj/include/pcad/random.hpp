#pragma once

#include <cstdint>
#include <random>

namespace pcad {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; used to derive independent stream seeds from a
// master seed and a counter.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of stream `index` under `master`. Streams for index i do not depend
/// on how many other streams are requested.
constexpr std::uint64_t split_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

inline Rng make_rng(std::uint64_t master, std::uint64_t index) {
  return Rng(split_seed(master, index));
}

template <typename R>
double uniform01(R& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

template <typename R>
double standard_normal(R& rng) {
  return std::normal_distribution<double>(0.0, 1.0)(rng);
}

template <typename R>
double sample_beta(double alpha, double beta, R& rng) {
  const double x = std::gamma_distribution<double>(alpha, 1.0)(rng);
  const double y = std::gamma_distribution<double>(beta, 1.0)(rng);
  return x / (x + y);
}

}  // namespace pcad
