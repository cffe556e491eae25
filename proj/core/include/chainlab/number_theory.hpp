#pragma once

#include <cstdint>
#include <vector>

namespace chainlab {

/// D_n(N) for every n = 1..N, with their mean S(N).
struct DimensionTable {
  std::int64_t N = 0;
  std::vector<std::int64_t> values;
  double S = 0.0;
};

/// (1/N0) sum_{N <= N0} S(N) / N and its ratio to ln N0.
struct AverageReport {
  std::int64_t N0 = 0;
  double cumulative = 0.0;
  double ratio_to_log = 0.0;
};

/// Maximum of S(N) / N^eps over 1 <= N <= N_max.
struct GrowthRow {
  double epsilon = 0.0;
  double max_ratio = 0.0;
  std::int64_t argmax_N = 0;
};

enum class SumMethod {
  kBruteForce,  // one gcd per n
  kDivisor,     // odd-divisor rearrangement
};

/// dim L0 = gcd(N, 2n - 1) - 1. Throws std::invalid_argument unless 1 <= n <= N.
std::int64_t conserved_dimension(std::int64_t N, std::int64_t n);

/// sum_{n=1}^{N} D_n(N), exactly.
std::int64_t dimension_sum(std::int64_t N, SumMethod method = SumMethod::kDivisor);

/// S(N) = dimension_sum(N) / N.
double mean_dimension(std::int64_t N);

DimensionTable dimension_table(std::int64_t N);

/// S(1), ..., S(N_max) at indices 1..N_max (index 0 unused). Work is split
/// across worker threads; the result does not depend on the split.
std::vector<double> mean_dimensions(std::int64_t N_max, SumMethod method = SumMethod::kDivisor);

/// Requires N0 >= 2.
AverageReport cumulative_average(std::int64_t N0, SumMethod method = SumMethod::kDivisor);

std::vector<GrowthRow> growth_scan(std::int64_t N_max, const std::vector<double>& epsilons);

}  // namespace chainlab
