#pragma once

#include <cstdint>
#include <random>

namespace gascap {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of the independent stream owned by run `run_index` of a batch:
/// splitmix64(master_seed ^ splitmix64(run_index)).
inline std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t run_index) {
  return splitmix64(master_seed ^ splitmix64(run_index));
}

inline Rng make_stream(std::uint64_t master_seed, std::uint64_t run_index) {
  return Rng(stream_seed(master_seed, run_index));
}

}  // namespace gascap
