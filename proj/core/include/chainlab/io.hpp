#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "chainlab/dynamics.hpp"
#include "chainlab/number_theory.hpp"

namespace chainlab {

/// Shortest round-trip-safe text: printf "%.17g".
std::string format_real(double value);

/// Header `t,H,power[,q_1..q_N,p_1..p_N]`, one row per sample.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj, bool with_coordinates);

/// Header `N,n,D`, one row per (N, n).
void write_dimension_csv(std::ostream& out, const std::vector<DimensionTable>& tables);

/// Header `N,S,S_over_Neps_<eps>...`; `S` holds S(1..N_max) at indices 1..N_max.
void write_scan_csv(std::ostream& out, const std::vector<double>& S,
                    const std::vector<double>& epsilons);

/// {"N0": ..., "cumulative": ..., "ratio_to_log": ...}
std::string average_report_json(const AverageReport& report);

}  // namespace chainlab
