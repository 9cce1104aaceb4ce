#pragma once

#include <cstdint>
#include <random>

namespace marl {

using Rng = std::mt19937_64;

// Stream seed for rollout worker `worker` of a run seeded with `seed`.
inline std::uint64_t worker_seed(std::uint64_t seed, std::uint64_t worker) {
  return seed * 10007ULL + worker;
}

inline double uniform01(Rng& rng) {
  // 53 random mantissa bits; identical across standard libraries.
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)) % n;
}

}  // namespace marl
