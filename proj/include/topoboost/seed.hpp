#pragma once

#include <cstdint>

namespace topoboost {

/// Independent random streams derived from one user seed.
enum class SeedStream : std::uint64_t {
  Noise = 1,
  Split = 2,
  Sampling = 3,
};

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// sub_seed = mix64(seed XOR mix64(stream)). Per-item seeds (e.g. the noise of
/// image i) are derive_seed(sub_seed, i) with i used as the stream value.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix64(seed ^ mix64(stream));
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, SeedStream stream) {
  return derive_seed(seed, static_cast<std::uint64_t>(stream));
}

}  // namespace topoboost
