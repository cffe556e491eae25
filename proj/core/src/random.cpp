#include "chainlab/random.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace chainlab {
namespace {

// Uniform on [0, 1) with 53 random bits.
double unit_uniform(SplitMix64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

PhaseState gaussian_state(int N, std::uint64_t seed) {
  if (N < 1) throw std::invalid_argument("gaussian_state needs N >= 1");
  SplitMix64 rng(seed);
  Eigen::VectorXd draws(2 * N);
  for (int i = 0; i < 2 * N; i += 2) {
    const double radius = std::sqrt(-2.0 * std::log(1.0 - unit_uniform(rng)));
    const double angle = 2.0 * std::numbers::pi * unit_uniform(rng);
    draws(i) = radius * std::cos(angle);
    draws(i + 1) = radius * std::sin(angle);
  }
  return PhaseState::from_stacked(draws);
}

}  // namespace chainlab
