#include "chainlab/io.hpp"

#include <cmath>
#include <cstdio>

#include <nlohmann/json.hpp>

namespace chainlab {

std::string format_real(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, bool with_coordinates) {
  const int N = traj.states.empty() ? 0 : traj.states.front().size();
  out << "t,H,power";
  if (with_coordinates) {
    for (int i = 1; i <= N; ++i) out << ",q_" << i;
    for (int i = 1; i <= N; ++i) out << ",p_" << i;
  }
  out << '\n';
  for (std::size_t j = 0; j < traj.size(); ++j) {
    out << format_real(traj.times[j]) << ',' << format_real(traj.energies[j]) << ','
        << format_real(traj.powers[j]);
    if (with_coordinates) {
      const PhaseState& s = traj.states[j];
      for (int i = 0; i < N; ++i) out << ',' << format_real(s.q(i));
      for (int i = 0; i < N; ++i) out << ',' << format_real(s.p(i));
    }
    out << '\n';
  }
}

void write_dimension_csv(std::ostream& out, const std::vector<DimensionTable>& tables) {
  out << "N,n,D\n";
  for (const DimensionTable& table : tables) {
    for (std::size_t i = 0; i < table.values.size(); ++i) {
      out << table.N << ',' << i + 1 << ',' << table.values[i] << '\n';
    }
  }
}

void write_scan_csv(std::ostream& out, const std::vector<double>& S,
                    const std::vector<double>& epsilons) {
  out << "N,S";
  for (double eps : epsilons) out << ",S_over_Neps_" << format_real(eps);
  out << '\n';
  for (std::size_t N = 1; N < S.size(); ++N) {
    out << N << ',' << format_real(S[N]);
    for (double eps : epsilons) {
      out << ',' << format_real(S[N] / std::pow(static_cast<double>(N), eps));
    }
    out << '\n';
  }
}

std::string average_report_json(const AverageReport& report) {
  const nlohmann::json doc = {
      {"N0", report.N0},
      {"cumulative", report.cumulative},
      {"ratio_to_log", report.ratio_to_log},
  };
  return doc.dump(2);
}

}  // namespace chainlab
