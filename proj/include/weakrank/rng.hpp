#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "weakrank/common.hpp"

namespace weakrank {

// All stochastic code draws through these helpers instead of the standard
// distribution objects, whose output sequences are implementation-defined.
// mt19937_64 itself is pinned by the standard, so a fixed seed produces the
// same stream on every platform.

inline double uniform01(std::mt19937_64& rng) {
  // 53 random bits -> double in [0, 1)
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

inline bool bernoulli(std::mt19937_64& rng, double p) {
  return uniform01(rng) < p;
}

// Unbiased integer in [0, n), n >= 1.
inline std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
  require(n > 0, "uniform_index: n must be positive");
  const std::uint64_t limit = std::mt19937_64::max() - std::mt19937_64::max() % n;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % n;
}

// Index drawn proportionally to non-negative weights.
inline std::size_t pick_weighted(std::mt19937_64& rng, const std::vector<double>& weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  require(total > 0.0, "pick_weighted: weights sum to zero");
  double u = uniform01(rng) * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    u -= weights[i];
    if (u < 0.0) return i;
  }
  return weights.size() - 1;
}

// Fisher-Yates shuffle driven by uniform_index, for reproducible orderings.
template <class T>
void shuffle_deterministic(std::vector<T>& items, std::mt19937_64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(uniform_index(rng, i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace weakrank
