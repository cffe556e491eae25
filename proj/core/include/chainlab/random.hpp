#pragma once

#include <cstdint>

#include "chainlab/chain_model.hpp"

namespace chainlab {

/// SplitMix64: the k-th output is a fixed 64-bit mix of seed + k * 0x9E3779B97F4A7C15.
/// Counter-based, so the stream depends only on the seed.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t operator()() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Phase state with independent standard normal q_1..q_N, then p_1..p_N.
///
/// Draws come from SplitMix64 through a Box-Muller transform on 53-bit
/// uniforms (pairs consumed in order). std::normal_distribution is avoided
/// because its algorithm is implementation-defined.
PhaseState gaussian_state(int N, std::uint64_t seed);

}  // namespace chainlab
