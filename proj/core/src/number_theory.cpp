#include "chainlab/number_theory.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

#include "chainlab/parallel.hpp"

namespace chainlab {
namespace {

using Factorization = std::vector<std::pair<std::int64_t, int>>;

Factorization factor_trial(std::int64_t m) {
  Factorization out;
  for (std::int64_t p = 2; p * p <= m; ++p) {
    if (m % p != 0) continue;
    int e = 0;
    while (m % p == 0) {
      m /= p;
      ++e;
    }
    out.emplace_back(p, e);
  }
  if (m > 1) out.emplace_back(m, 1);
  return out;
}

Factorization factor_sieve(std::int64_t m, const std::vector<std::int32_t>& spf) {
  Factorization out;
  while (m > 1) {
    const std::int64_t p = spf[static_cast<std::size_t>(m)];
    int e = 0;
    while (m % p == 0) {
      m /= p;
      ++e;
    }
    out.emplace_back(p, e);
  }
  return out;
}

std::vector<std::int32_t> smallest_prime_factors(std::int64_t limit) {
  std::vector<std::int32_t> spf(static_cast<std::size_t>(limit) + 1, 0);
  for (std::int64_t i = 2; i <= limit; ++i) {
    if (spf[static_cast<std::size_t>(i)] != 0) continue;
    for (std::int64_t j = i; j <= limit; j += i) {
      if (spf[static_cast<std::size_t>(j)] == 0) spf[static_cast<std::size_t>(j)] = static_cast<std::int32_t>(i);
    }
  }
  return spf;
}

std::int64_t ipow(std::int64_t base, int e) {
  std::int64_t r = 1;
  while (e-- > 0) r *= base;
  return r;
}

// sum_{n=1}^{N} gcd(N, 2n-1) regrouped by d = gcd: for N = 2^a M with M odd,
// exactly 2^a phi(M/d) values of n give gcd d, for each divisor d of M.
std::int64_t gcd_sum_by_divisors(const Factorization& factors) {
  std::int64_t two_power = 1;
  Factorization odd;
  for (const auto& [p, e] : factors) {
    if (p == 2) {
      two_power = ipow(2, e);
    } else {
      odd.emplace_back(p, e);
    }
  }
  // Walk all exponent vectors a with 0 <= a_i <= e_i.
  std::vector<int> a(odd.size(), 0);
  std::int64_t total = 0;
  for (;;) {
    std::int64_t d = 1;
    std::int64_t phi_cofactor = 1;
    for (std::size_t i = 0; i < odd.size(); ++i) {
      const auto [p, e] = odd[i];
      d *= ipow(p, a[i]);
      const int rest = e - a[i];
      if (rest > 0) phi_cofactor *= ipow(p, rest - 1) * (p - 1);
    }
    total += d * two_power * phi_cofactor;

    std::size_t i = 0;
    while (i < odd.size() && a[i] == odd[i].second) {
      a[i] = 0;
      ++i;
    }
    if (i == odd.size()) break;
    ++a[i];
  }
  return total;
}

std::int64_t gcd_sum_brute(std::int64_t N) {
  std::int64_t total = 0;
  for (std::int64_t n = 1; n <= N; ++n) total += std::gcd(N, 2 * n - 1);
  return total;
}

void require_positive(std::int64_t N, const char* what) {
  if (N < 1) throw std::invalid_argument(std::string(what) + " needs N >= 1");
}

}  // namespace

std::int64_t conserved_dimension(std::int64_t N, std::int64_t n) {
  if (N < 1 || n < 1 || n > N) {
    throw std::invalid_argument("D_n(N) needs 1 <= n <= N (got N=" + std::to_string(N) +
                                ", n=" + std::to_string(n) + ")");
  }
  return std::gcd(N, 2 * n - 1) - 1;
}

std::int64_t dimension_sum(std::int64_t N, SumMethod method) {
  require_positive(N, "dimension_sum");
  const std::int64_t gcds =
      method == SumMethod::kBruteForce ? gcd_sum_brute(N) : gcd_sum_by_divisors(factor_trial(N));
  return gcds - N;
}

double mean_dimension(std::int64_t N) {
  return static_cast<double>(dimension_sum(N)) / static_cast<double>(N);
}

DimensionTable dimension_table(std::int64_t N) {
  require_positive(N, "dimension_table");
  DimensionTable table;
  table.N = N;
  table.values.reserve(static_cast<std::size_t>(N));
  std::int64_t sum = 0;
  for (std::int64_t n = 1; n <= N; ++n) {
    table.values.push_back(conserved_dimension(N, n));
    sum += table.values.back();
  }
  table.S = static_cast<double>(sum) / static_cast<double>(N);
  return table;
}

std::vector<double> mean_dimensions(std::int64_t N_max, SumMethod method) {
  require_positive(N_max, "mean_dimensions");
  std::vector<double> S(static_cast<std::size_t>(N_max) + 1, 0.0);
  std::vector<std::int32_t> spf;
  if (method == SumMethod::kDivisor) spf = smallest_prime_factors(N_max);
  parallel_for(1, N_max + 1, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t N = begin; N < end; ++N) {
      const std::int64_t gcds = method == SumMethod::kBruteForce
                                    ? gcd_sum_brute(N)
                                    : gcd_sum_by_divisors(factor_sieve(N, spf));
      S[static_cast<std::size_t>(N)] = static_cast<double>(gcds - N) / static_cast<double>(N);
    }
  });
  return S;
}

AverageReport cumulative_average(std::int64_t N0, SumMethod method) {
  if (N0 < 2) throw std::invalid_argument("cumulative_average needs N0 >= 2");
  const std::vector<double> S = mean_dimensions(N0, method);
  // Fixed summation order keeps the result independent of the thread split.
  long double total = 0.0L;
  for (std::int64_t N = 1; N <= N0; ++N) {
    total += static_cast<long double>(S[static_cast<std::size_t>(N)]) / N;
  }
  AverageReport report;
  report.N0 = N0;
  report.cumulative = static_cast<double>(total / N0);
  report.ratio_to_log = report.cumulative / std::log(static_cast<double>(N0));
  return report;
}

std::vector<GrowthRow> growth_scan(std::int64_t N_max, const std::vector<double>& epsilons) {
  if (N_max < 2) throw std::invalid_argument("growth_scan needs N_max >= 2");
  for (double eps : epsilons) {
    if (!(eps > 0.0)) throw std::invalid_argument("growth_scan exponents must be positive");
  }
  const std::vector<double> S = mean_dimensions(N_max);
  std::vector<GrowthRow> rows;
  rows.reserve(epsilons.size());
  for (double eps : epsilons) {
    GrowthRow row{eps, 0.0, 1};
    for (std::int64_t N = 1; N <= N_max; ++N) {
      const double ratio = S[static_cast<std::size_t>(N)] / std::pow(static_cast<double>(N), eps);
      if (ratio > row.max_ratio) {
        row.max_ratio = ratio;
        row.argmax_N = N;
      }
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace chainlab
