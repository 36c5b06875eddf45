#pragma once

#include <cstdint>
#include <random>

namespace affnego {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; derives independent stream seeds from a root seed.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream, std::uint64_t index = 0) {
  return mix_seed(mix_seed(root ^ mix_seed(stream)) + index);
}

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

}  // namespace affnego
