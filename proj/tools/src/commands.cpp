#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "chainlab/dynamics.hpp"
#include "chainlab/io.hpp"
#include "chainlab/number_theory.hpp"
#include "chainlab/random.hpp"
#include "chainlab/spectral.hpp"

namespace chainlab::cli {
namespace {

using nlohmann::json;

constexpr std::int64_t kRangeWarn = 10'000'000;
constexpr std::int64_t kRangeLimit = 100'000'000;
constexpr std::int64_t kVerifyLimit = 5000;
constexpr int kTargetSamples = 4000;
// Decay horizon in units of 1 / c2.
constexpr double kDecayHorizon = 40.0;
// Acceptance thresholds of the decay experiment.
constexpr double kDecayEnergyRatio = 1e-6;
constexpr double kDecayFitTolerance = 0.2;

struct Options {
  std::int64_t N = 0;
  std::int64_t n = 0;
  ChainParams params;
  std::uint64_t seed = 1;
  int seeds = 5;
  double t_end = 0.0;
  double dt = 0.0;
  std::string project = "none";
  std::string format;
  std::string out_path;
  std::string method = "exact";
  int stride = 0;
  bool verify = false;
  bool all_n = false;
  bool coords = false;
  std::vector<double> epsilons{0.25, 0.5, 1.0};
};

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

std::string fmt(double x) { return format_real(x); }

// Writes a data document to --out if given, otherwise to `out`.
void emit(const Options& opt, std::ostream& out, const std::function<void(std::ostream&)>& body) {
  if (opt.out_path.empty()) {
    body(out);
    return;
  }
  std::ofstream file(opt.out_path, std::ios::binary);
  if (!file) throw UsageError("cannot open output file: " + opt.out_path);
  body(file);
  if (!file) throw UsageError("failed writing output file: " + opt.out_path);
}

void check_range(std::int64_t value, const char* what, std::ostream& err) {
  if (value > kRangeLimit) {
    throw UsageError(std::string("resource guard exceeded: ") + what + " > " +
                     std::to_string(kRangeLimit));
  }
  if (value > kRangeWarn) {
    err << "warning: " << what << " = " << value << " is large; this may take a while\n";
  }
}

ChainParams chain_params(const Options& opt) {
  ChainParams p = opt.params;
  if (opt.N < 1 || opt.N > std::numeric_limits<int>::max()) throw UsageError("N out of range");
  p.N = static_cast<int>(opt.N);
  p.n = static_cast<int>(std::clamp<std::int64_t>(opt.n, 0, p.N + 1));
  p.validate();
  return p;
}

Trajectory run_trajectory(const Options& opt, const ChainParams& p, const PhaseState& psi0,
                          double t_end, double dt) {
  int stride = opt.stride;
  if (stride <= 0) {
    const double steps = std::ceil(t_end / dt);
    stride = static_cast<int>(std::max(1.0, std::ceil(steps / kTargetSamples)));
  }
  if (opt.method == "rk4") return integrate(p, psi0, t_end, dt, stride);
  return propagate_trajectory(p, psi0, t_end, dt, stride);
}

void print_summary(std::ostream& out, const json& summary, bool as_json,
                   const std::vector<std::string>& order) {
  if (as_json) {
    out << summary.dump(2) << '\n';
    return;
  }
  for (const std::string& key : order) {
    const json& v = summary.at(key);
    out << key << '=';
    if (v.is_number_float()) {
      out << fmt(v.get<double>());
    } else if (v.is_string()) {
      out << v.get<std::string>();
    } else if (v.is_null()) {
      out << "nan";
    } else {
      out << v.dump();
    }
    out << '\n';
  }
}

int cmd_dim(const Options& opt, std::ostream& out, std::ostream& err) {
  if (opt.N < 1) throw UsageError("dim needs N >= 1");
  if (!opt.all_n && opt.n == 0) throw UsageError("dim needs n, or --all-n");
  if (!opt.all_n && (opt.n < 1 || opt.n > opt.N)) throw UsageError("dim needs 1 <= n <= N");
  check_range(opt.N, "N", err);
  if (opt.verify && opt.N > kVerifyLimit) {
    throw UsageError("resource guard exceeded: --verify needs N <= " +
                     std::to_string(kVerifyLimit));
  }
  const std::int64_t first = opt.all_n ? 1 : opt.n;
  const std::int64_t last = opt.all_n ? opt.N : opt.n;

  struct Row {
    std::int64_t n, gcd, spectral, krylov;
    bool agree;
  };
  std::vector<Row> rows;
  std::unique_ptr<StiffnessMatrix> V;
  ChainParams p = opt.params;
  if (opt.verify) {
    p.N = static_cast<int>(opt.N);
    p.n = 1;
    p.validate();
    V = std::make_unique<StiffnessMatrix>(build_stiffness(p));
  }
  bool all_agree = true;
  for (std::int64_t n = first; n <= last; ++n) {
    Row r{n, conserved_dimension(opt.N, n), 0, 0, true};
    if (opt.verify) {
      p.n = static_cast<int>(n);
      r.spectral = dim_L0_spectral(p);
      r.krylov = 2 * (opt.N - krylov_dim(*V, p.n));
      r.agree = r.gcd == r.spectral && r.gcd == r.krylov;
      all_agree = all_agree && r.agree;
    }
    rows.push_back(r);
  }

  const bool as_json = opt.format == "json";
  emit(opt, out, [&](std::ostream& os) {
    if (as_json) {
      json doc = json::array();
      for (const Row& r : rows) {
        json item{{"N", opt.N}, {"n", r.n}, {"D", r.gcd}};
        if (opt.verify) {
          item["D_spectral"] = r.spectral;
          item["D_krylov"] = r.krylov;
          item["agree"] = r.agree;
        }
        doc.push_back(item);
      }
      os << doc.dump(2) << '\n';
      return;
    }
    os << (opt.verify ? "N,n,D,D_spectral,D_krylov,agree\n" : "N,n,D\n");
    for (const Row& r : rows) {
      os << opt.N << ',' << r.n << ',' << r.gcd;
      if (opt.verify) {
        os << ',' << r.spectral << ',' << r.krylov << ',' << (r.agree ? "yes" : "no");
      }
      os << '\n';
    }
  });
  if (!all_agree) {
    err << "error: dimension disagreement between gcd, spectral and Krylov values\n";
    return kVerificationFailed;
  }
  return kSuccess;
}

int cmd_scan(const Options& opt, std::ostream& out, std::ostream& err) {
  if (opt.N < 1) throw UsageError("scan needs N_max >= 1");
  check_range(opt.N, "N_max", err);
  for (double eps : opt.epsilons) {
    if (!(eps > 0.0)) throw UsageError("--eps values must be positive");
  }
  const std::vector<double> S = mean_dimensions(opt.N);
  emit(opt, out, [&](std::ostream& os) {
    if (opt.format != "json") {
      write_scan_csv(os, S, opt.epsilons);
      return;
    }
    json doc;
    doc["N_max"] = opt.N;
    doc["S"] = std::vector<double>(S.begin() + 1, S.end());
    if (opt.N >= 2) {
      json growth = json::array();
      for (const GrowthRow& g : growth_scan(opt.N, opt.epsilons)) {
        growth.push_back({{"epsilon", g.epsilon}, {"max_ratio", g.max_ratio},
                          {"argmax_N", g.argmax_N}});
      }
      doc["growth"] = growth;
    }
    os << doc.dump(2) << '\n';
  });
  return kSuccess;
}

int cmd_avg(const Options& opt, std::ostream& out, std::ostream& err) {
  if (opt.N < 2) throw UsageError("avg needs N0 >= 2");
  check_range(opt.N, "N0", err);
  const AverageReport report = cumulative_average(opt.N);
  emit(opt, out, [&](std::ostream& os) {
    if (opt.format == "csv") {
      os << "N0,cumulative,ratio_to_log\n"
         << report.N0 << ',' << fmt(report.cumulative) << ',' << fmt(report.ratio_to_log) << '\n';
    } else {
      os << average_report_json(report) << '\n';
    }
  });
  return kSuccess;
}

int cmd_spectrum(const Options& opt, std::ostream& out, std::ostream&) {
  const ChainParams p = chain_params(opt);
  const StiffnessMatrix V = build_stiffness(p);
  const SpectralData closed = closed_form_spectrum(p);
  const SpectralData numeric = numeric_spectrum(V);
  const double lambda_max = std::max(1.0, closed.eigenvalues.cwiseAbs().maxCoeff());

  std::vector<double> diff(p.N), residual(p.N);
  std::vector<int> conserved(p.N, 0);
  for (int k : split_subspaces(p, closed).conserved_modes) conserved[k] = 1;
  double max_diff = 0.0, max_residual = 0.0;
  for (int k = 0; k < p.N; ++k) {
    diff[k] = std::abs(closed.eigenvalues(k) - numeric.eigenvalues(k));
    const auto y = closed.eigenvectors.col(k);
    residual[k] = (V.matrix() * y - closed.eigenvalues(k) * y).norm() / lambda_max;
    max_diff = std::max(max_diff, diff[k]);
    max_residual = std::max(max_residual, residual[k]);
  }
  const bool ok = max_diff <= tolerance::kEig * lambda_max && max_residual <= tolerance::kEig;

  emit(opt, out, [&](std::ostream& os) {
    if (opt.format == "json") {
      json modes = json::array();
      for (int k = 0; k < p.N; ++k) {
        modes.push_back({{"k", k},
                         {"lambda_closed", closed.eigenvalues(k)},
                         {"lambda_numeric", numeric.eigenvalues(k)},
                         {"abs_difference", diff[k]},
                         {"residual", residual[k]},
                         {"conserved", conserved[k] == 1}});
      }
      json doc{{"N", p.N}, {"n", p.n}, {"omega0", p.omega0}, {"omega1", p.omega1},
               {"modes", modes}, {"max_abs_difference", max_diff},
               {"max_residual", max_residual}};
      os << doc.dump(2) << '\n';
      return;
    }
    os << "k,lambda_closed,lambda_numeric,abs_difference,residual,conserved\n";
    for (int k = 0; k < p.N; ++k) {
      os << k << ',' << fmt(closed.eigenvalues(k)) << ',' << fmt(numeric.eigenvalues(k)) << ','
         << fmt(diff[k]) << ',' << fmt(residual[k]) << ',' << conserved[k] << '\n';
    }
  });
  if (opt.verify && !ok) return kVerificationFailed;
  return kSuccess;
}

// Least-squares decay rate of H - H_limit, using samples until the excess drops
// below `floor` (roundoff level); null when too few samples remain.
json fitted_rate(const Trajectory& traj, double H_limit, double floor, double* r_squared) {
  Trajectory excess;
  for (std::size_t j = 0; j < traj.size(); ++j) {
    const double e = traj.energies[j] - H_limit;
    if (!(e > floor)) break;
    excess.times.push_back(traj.times[j]);
    excess.energies.push_back(e);
    excess.powers.push_back(traj.powers[j]);
  }
  try {
    const DecayFit fit = fit_decay(excess);
    if (r_squared) *r_squared = fit.r_squared;
    return fit.c2_hat;
  } catch (const DegenerateFitError&) {
    return nullptr;
  }
}

int cmd_simulate(const Options& opt, std::ostream& out, std::ostream&) {
  const ChainParams p = chain_params(opt);
  if (opt.project != "none" && opt.project != "zero" && opt.project != "minus") {
    throw UsageError("--project must be zero, minus or none");
  }
  const StiffnessMatrix V = build_stiffness(p);
  const SubspaceSplit split = split_subspaces(p, closed_form_spectrum(p));
  const double c2 = theoretical_decay_rate(p, split);
  const double t_end = opt.t_end > 0.0 ? opt.t_end : kDecayHorizon / c2;
  const double dt = opt.dt > 0.0 ? opt.dt : default_time_step(p);

  PhaseState psi0 = gaussian_state(p.N, opt.seed);
  const auto parts = project(psi0, split, V);
  if (opt.project == "zero") psi0 = parts.first;
  if (opt.project == "minus") psi0 = parts.second;
  // Energy of the conserved component, which H(t) approaches.
  const double H_limit = opt.project == "minus" ? 0.0 : energy(parts.first, V);

  const Trajectory traj = run_trajectory(opt, p, psi0, t_end, dt);
  const double H0 = traj.energies.front();
  const double H1 = traj.energies.back();
  double r2 = std::numeric_limits<double>::quiet_NaN();
  // Below this the excess H - H_limit is dominated by propagation error, not
  // decay (RK4 drifts by ~1e-8 of H per unit time on the conserved modes).
  const double excess_floor = opt.method == "rk4" ? 1e-6 : 1e-10;
  const json c2_fit = opt.project == "zero"
                          ? json(nullptr)
                          : fitted_rate(traj, H_limit, opt.project == "minus" ? 0.0 : excess_floor * H0, &r2);

  if (!opt.out_path.empty()) {
    emit(opt, out, [&](std::ostream& os) { write_trajectory_csv(os, traj, opt.coords); });
  }
  json summary{{"N", p.N},
               {"n", p.n},
               {"seed", opt.seed},
               {"project", opt.project},
               {"method", opt.method},
               {"t_end", traj.times.back()},
               {"dt", dt},
               {"samples", traj.size()},
               {"H_initial", H0},
               {"H_final", H1},
               {"H_limit", H_limit},
               {"H_final_over_H_initial", H0 > 0.0 ? json(H1 / H0) : json(nullptr)},
               {"c2_theory", c2},
               {"c2_fit", c2_fit},
               {"fit_r_squared", std::isnan(r2) ? json(nullptr) : json(r2)}};
  print_summary(out, summary, opt.format == "json",
                {"N", "n", "seed", "project", "method", "t_end", "dt", "samples", "H_initial",
                 "H_final", "H_limit", "H_final_over_H_initial", "c2_theory", "c2_fit",
                 "fit_r_squared"});
  return kSuccess;
}

int cmd_decay(const Options& opt, std::ostream& out, std::ostream& err) {
  const ChainParams p = chain_params(opt);
  if (opt.seeds < 1) throw UsageError("--seeds must be positive");
  const StiffnessMatrix V = build_stiffness(p);
  const SubspaceSplit split = split_subspaces(p, closed_form_spectrum(p));
  const double c2 = theoretical_decay_rate(p, split);
  const double t_end = opt.t_end > 0.0 ? opt.t_end : kDecayHorizon / c2;
  const double dt = opt.dt > 0.0 ? opt.dt : default_time_step(p);

  struct Row {
    std::uint64_t seed;
    json c2_fit;
    double rel_error, ratio, r2;
  };
  std::vector<Row> rows;
  bool ok = true;
  for (int s = 0; s < opt.seeds; ++s) {
    const std::uint64_t seed = opt.seed + static_cast<std::uint64_t>(s);
    const PhaseState psi0 = project(gaussian_state(p.N, seed), split, V).second;
    const Trajectory traj = run_trajectory(opt, p, psi0, t_end, dt);
    double r2 = std::numeric_limits<double>::quiet_NaN();
    const json fit = fitted_rate(traj, 0.0, 0.0, &r2);
    const double rel = fit.is_null() ? std::numeric_limits<double>::quiet_NaN()
                                     : std::abs(fit.get<double>() - c2) / c2;
    const double ratio = traj.energies.back() / traj.energies.front();
    ok = ok && ratio <= kDecayEnergyRatio && rel <= kDecayFitTolerance;
    rows.push_back({seed, fit, rel, ratio, r2});
  }

  emit(opt, out, [&](std::ostream& os) {
    auto nullable = [](double x) { return std::isnan(x) ? json(nullptr) : json(x); };
    if (opt.format == "json") {
      json doc = json::array();
      for (const Row& r : rows) {
        doc.push_back({{"seed", r.seed}, {"c2_theory", c2}, {"c2_fit", r.c2_fit},
                       {"relative_error", nullable(r.rel_error)},
                       {"H_final_over_H_initial", r.ratio}, {"fit_r_squared", nullable(r.r2)}});
      }
      os << doc.dump(2) << '\n';
      return;
    }
    os << "seed,c2_theory,c2_fit,relative_error,H_final_over_H_initial,fit_r_squared\n";
    for (const Row& r : rows) {
      os << r.seed << ',' << fmt(c2) << ','
         << (r.c2_fit.is_null() ? "nan" : fmt(r.c2_fit.get<double>())) << ','
         << fmt(r.rel_error) << ',' << fmt(r.ratio) << ',' << fmt(r.r2) << '\n';
    }
  });
  if (opt.verify && !ok) {
    err << "error: decay check failed (H ratio > " << fmt(kDecayEnergyRatio)
        << " or fitted rate off by more than " << fmt(kDecayFitTolerance * 100) << "%)\n";
    return kVerificationFailed;
  }
  return kSuccess;
}

void add_chain_options(CLI::App* cmd, Options& opt, bool positional_size) {
  if (!positional_size) {
    cmd->add_option("--N", opt.N, "Number of particles")->required();
    cmd->add_option("--n", opt.n, "Dissipating particle (1-based)")->capture_default_str();
  }
  cmd->add_option("--alpha", opt.params.alpha, "Damping coefficient")->capture_default_str();
  cmd->add_option("--omega0", opt.params.omega0, "On-site stiffness")->capture_default_str();
  cmd->add_option("--omega1", opt.params.omega1, "Coupling stiffness")->capture_default_str();
}

void add_output_options(CLI::App* cmd, Options& opt) {
  cmd->add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--out", opt.out_path, "Output file");
}

void add_time_options(CLI::App* cmd, Options& opt) {
  cmd->add_option("--seed", opt.seed, "Seed of the Gaussian initial state")->capture_default_str();
  cmd->add_option("--t-end", opt.t_end, "End time (default 40 / c2)");
  cmd->add_option("--dt", opt.dt, "Time step (default 0.1 / sqrt(lambda_max))");
  cmd->add_option("--method", opt.method, "Propagation: exact or rk4")
      ->check(CLI::IsMember({"exact", "rk4"}))
      ->capture_default_str();
  cmd->add_option("--stride", opt.stride, "Record every stride-th step (default: ~4000 samples)");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options opt;
  opt.n = 0;
  CLI::App app{"Dissipation in harmonic chains: conserved subspaces and decay experiments",
               "chain_lab"};
  app.require_subcommand(1);

  CLI::App* dim = app.add_subcommand("dim", "Dimension of the conserved subspace");
  dim->add_option("N", opt.N, "Number of particles")->required();
  dim->add_option("n", opt.n, "Dissipating particle");
  dim->add_flag("--all-n", opt.all_n, "Tabulate every n = 1..N");
  dim->add_flag("--verify", opt.verify, "Cross-check against spectral and Krylov values");
  add_chain_options(dim, opt, true);
  add_output_options(dim, opt);

  CLI::App* scan = app.add_subcommand("scan", "Mean dimension S(N) for N = 1..N_max");
  scan->add_option("N_max", opt.N, "Largest N")->required();
  scan->add_option("--eps", opt.epsilons, "Exponents for S(N) / N^eps")->capture_default_str();
  add_output_options(scan, opt);

  CLI::App* avg = app.add_subcommand("avg", "Cumulative average of S(N) up to N0");
  avg->add_option("N0", opt.N, "Upper limit")->required();
  add_output_options(avg, opt);

  CLI::App* spectrum = app.add_subcommand("spectrum", "Closed-form and numeric spectrum of V");
  add_chain_options(spectrum, opt, false);
  spectrum->add_flag("--verify", opt.verify, "Fail when the two spectra disagree");
  add_output_options(spectrum, opt);

  CLI::App* simulate = app.add_subcommand("simulate", "Propagate a random initial state");
  add_chain_options(simulate, opt, false);
  add_time_options(simulate, opt);
  simulate->add_option("--project", opt.project, "Project the initial state first")
      ->check(CLI::IsMember({"zero", "minus", "none"}))
      ->capture_default_str();
  simulate->add_flag("--coords", opt.coords, "Include q and p columns in the trajectory file");
  add_output_options(simulate, opt);

  CLI::App* decay = app.add_subcommand("decay", "Fitted versus theoretical decay rate on L-");
  add_chain_options(decay, opt, false);
  add_time_options(decay, opt);
  decay->add_option("--seeds", opt.seeds, "Number of consecutive seeds")->capture_default_str();
  decay->add_flag("--verify", opt.verify, "Fail unless every seed decays as predicted");
  add_output_options(decay, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kInvalidInput;
  }

  try {
    if (opt.n == 0 && !dim->parsed()) opt.n = 1;
    if (dim->parsed()) return cmd_dim(opt, out, err);
    if (scan->parsed()) return cmd_scan(opt, out, err);
    if (avg->parsed()) {
      if (opt.format.empty()) opt.format = "json";
      return cmd_avg(opt, out, err);
    }
    if (spectrum->parsed()) return cmd_spectrum(opt, out, err);
    if (simulate->parsed()) return cmd_simulate(opt, out, err);
    if (decay->parsed()) return cmd_decay(opt, out, err);
  } catch (const StepSizeError& e) {
    err << "error: " << e.what() << " (largest admissible dt = " << fmt(e.admissible()) << ")\n";
    return kInvalidInput;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const SpectralError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kVerificationFailed;
  }
  return kInvalidInput;
}

}  // namespace chainlab::cli
