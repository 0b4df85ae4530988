#pragma once

#include <cstdint>
#include <random>

namespace trendrev {

/// SplitMix64 finalizer: a bijective 64-bit mixer.
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed of substream `index` under `master`. Depends only on (master, index), so
/// a path's randomness does not depend on which thread draws it or when.
constexpr std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 0xD1B54A32D192ED03ULL));
}

inline std::mt19937_64 make_substream(std::uint64_t master, std::uint64_t index) {
  return std::mt19937_64{substream_seed(master, index)};
}

}  // namespace trendrev
