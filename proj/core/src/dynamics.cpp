#include "chainlab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

namespace chainlab {
namespace {

std::string step_message(double requested, double admissible) {
  std::ostringstream os;
  os.precision(17);
  os << "time step " << requested << " violates dt*sqrt(lambda_max) <= "
     << kStepStabilityBound << "; admissible dt <= " << admissible;
  return os.str();
}

int grid_steps(double t_end, double dt) {
  if (!(t_end > 0.0) || !(dt > 0.0) || !std::isfinite(t_end) || !std::isfinite(dt)) {
    throw std::invalid_argument("t_end and dt must be positive and finite");
  }
  const double ratio = t_end / dt;
  if (ratio > static_cast<double>(std::numeric_limits<int>::max() - 1)) {
    throw std::invalid_argument("too many time steps");
  }
  // Tolerate ratios that are integral up to roundoff.
  return std::max(1, static_cast<int>(std::ceil(ratio * (1.0 - 1e-12))));
}

}  // namespace

StepSizeError::StepSizeError(double requested, double admissible)
    : std::invalid_argument(step_message(requested, admissible)),
      requested_(requested),
      admissible_(admissible) {}

void Trajectory::push(double t, PhaseState state, const StiffnessMatrix& V,
                      const ChainParams& params) {
  energies.push_back(energy(state, V));
  powers.push_back(power_dissipated(state, params));
  times.push_back(t);
  states.push_back(std::move(state));
}

ExactPropagator::ExactPropagator(const DriftMatrix& A, PropagationMethod method)
    : A_(A.matrix()), method_(method) {
  if (method_ == PropagationMethod::kPade) return;

  Eigen::EigenSolver<Eigen::MatrixXd> solver(A_, true);
  bool usable = solver.info() == Eigen::Success;
  if (usable) {
    mu_ = solver.eigenvalues();
    X_ = solver.eigenvectors();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(X_);
    const auto& sv = svd.singularValues();
    const double smallest = sv(sv.size() - 1);
    condition_ = smallest > 0.0 ? sv(0) / smallest : std::numeric_limits<double>::infinity();
    usable = condition_ < kEigenConditionLimit;
  }
  if (usable) {
    X_inv_ = X_.partialPivLu().inverse();
    method_ = PropagationMethod::kEigen;
  } else if (method_ == PropagationMethod::kEigen) {
    throw NumericalError("drift matrix is too close to defective for eigen propagation");
  } else {
    method_ = PropagationMethod::kPade;
  }
}

PhaseState ExactPropagator::operator()(const PhaseState& psi0, double t) const {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw std::invalid_argument("propagation time must be finite and non-negative");
  }
  if (2 * psi0.size() != A_.rows()) {
    throw std::invalid_argument("state dimension does not match drift matrix");
  }
  if (t == 0.0) return psi0;
  Eigen::VectorXd out;
  if (method_ == PropagationMethod::kEigen) {
    const Eigen::VectorXcd c = X_inv_ * psi0.stacked().cast<std::complex<double>>();
    const Eigen::VectorXcd growth = (mu_ * t).array().exp().matrix();
    out = (X_ * growth.cwiseProduct(c)).real();
  } else {
    const Eigen::MatrixXd step = (A_ * t).exp();
    out = step * psi0.stacked();
  }
  if (!out.allFinite()) {
    throw NumericalError("exact propagation produced a non-finite state");
  }
  return PhaseState::from_stacked(out);
}

std::vector<PhaseState> ExactPropagator::sample(const PhaseState& psi0, double dt, int steps,
                                                int stride) const {
  if (2 * psi0.size() != A_.rows()) {
    throw std::invalid_argument("state dimension does not match drift matrix");
  }
  if (steps < 0 || stride < 1) throw std::invalid_argument("invalid sampling grid");
  const auto recorded = [&](int j) { return j % stride == 0 || j == steps; };
  std::vector<PhaseState> out;
  out.reserve(static_cast<std::size_t>(steps / stride) + 2);
  out.push_back(psi0);
  if (method_ == PropagationMethod::kEigen) {
    const Eigen::VectorXcd c = X_inv_ * psi0.stacked().cast<std::complex<double>>();
    for (int j = 1; j <= steps; ++j) {
      if (!recorded(j)) continue;
      const Eigen::VectorXcd growth = (mu_ * (j * dt)).array().exp().matrix();
      out.push_back(PhaseState::from_stacked((X_ * growth.cwiseProduct(c)).real()));
    }
  } else {
    const Eigen::MatrixXd step = (A_ * dt).exp();
    Eigen::VectorXd psi = psi0.stacked();
    for (int j = 1; j <= steps; ++j) {
      psi = step * psi;
      if (recorded(j)) out.push_back(PhaseState::from_stacked(psi));
    }
  }
  if (!out.back().all_finite()) {
    throw NumericalError("exact propagation produced a non-finite state");
  }
  return out;
}

PhaseState exact_propagate(const DriftMatrix& A, const PhaseState& psi0, double t,
                           PropagationMethod method) {
  return ExactPropagator(A, method)(psi0, t);
}

double default_time_step(const ChainParams& params) {
  params.validate();
  return kStepStabilityBound / std::sqrt(max_stiffness_eigenvalue(params));
}

Trajectory integrate(const ChainParams& params, const PhaseState& psi0, double t_end,
                     double dt, int stride) {
  params.validate();
  if (psi0.size() != params.N) {
    throw std::invalid_argument("initial state dimension does not match chain size");
  }
  if (stride < 1) throw std::invalid_argument("stride must be >= 1");
  const int steps = grid_steps(t_end, dt);
  const double admissible = default_time_step(params);
  if (dt > admissible * (1.0 + 1e-12)) {
    throw StepSizeError(dt, admissible);
  }
  const double h = t_end / steps;

  const StiffnessMatrix V = build_stiffness(params);
  const Eigen::MatrixXd A = build_drift(params, V).matrix();

  Trajectory traj;
  traj.push(0.0, psi0, V, params);
  Eigen::VectorXd psi = psi0.stacked();
  Eigen::VectorXd k1, k2, k3, k4;
  for (int j = 1; j <= steps; ++j) {
    k1.noalias() = A * psi;
    k2.noalias() = A * (psi + 0.5 * h * k1);
    k3.noalias() = A * (psi + 0.5 * h * k2);
    k4.noalias() = A * (psi + h * k3);
    psi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!psi.allFinite()) {
      throw NumericalError("integration produced a non-finite state at step " +
                           std::to_string(j));
    }
    if (j % stride == 0 || j == steps) {
      traj.push(j == steps ? t_end : j * h, PhaseState::from_stacked(psi), V, params);
    }
  }
  return traj;
}

Trajectory propagate_trajectory(const ChainParams& params, const PhaseState& psi0,
                                double t_end, double dt, int stride,
                                PropagationMethod method) {
  params.validate();
  if (psi0.size() != params.N) {
    throw std::invalid_argument("initial state dimension does not match chain size");
  }
  if (stride < 1) throw std::invalid_argument("stride must be >= 1");
  const int steps = grid_steps(t_end, dt);
  const double h = t_end / steps;

  const StiffnessMatrix V = build_stiffness(params);
  const ExactPropagator propagator(build_drift(params, V), method);
  std::vector<PhaseState> states = propagator.sample(psi0, h, steps, stride);

  Trajectory traj;
  std::size_t next = 0;
  for (int j = 0; j <= steps; ++j) {
    if (j % stride == 0 || j == steps) {
      traj.push(j == steps ? t_end : j * h, std::move(states[next++]), V, params);
    }
  }
  return traj;
}

double verify_dissipation_identity(const Trajectory& traj, const ChainParams& params) {
  if (traj.size() < 3) {
    throw std::invalid_argument("dissipation check needs at least 3 samples");
  }
  if (traj.states.front().size() != params.N) {
    throw std::invalid_argument("trajectory does not match chain size");
  }
  const auto& t = traj.times;
  const auto& H = traj.energies;
  double worst = 0.0;
  double power_scale = 0.0;
  for (std::size_t j = 0; j < traj.size(); ++j) {
    power_scale = std::max(power_scale, std::abs(traj.powers[j]));
  }
  for (std::size_t j = 1; j + 1 < traj.size(); ++j) {
    const double dHdt = (H[j + 1] - H[j - 1]) / (t[j + 1] - t[j - 1]);
    worst = std::max(worst, std::abs(dHdt - traj.powers[j]));
  }
  const double scale = std::max(power_scale, H.front() / t.back());
  return scale > 0.0 ? worst / scale : 0.0;
}

double theoretical_decay_rate(const ChainParams& params, const SubspaceSplit& split) {
  if (split.decaying_basis.empty()) {
    throw std::invalid_argument("decaying subspace is empty");
  }
  const StiffnessMatrix V = build_stiffness(params);
  const DriftMatrix A = build_drift(params, V);
  const Eigen::MatrixXd W = split.decaying_matrix();
  if (W.rows() != A.matrix().rows()) {
    throw std::invalid_argument("subspace split does not match chain size");
  }
  const Eigen::MatrixXd restricted = W.transpose() * A.matrix() * W;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(restricted, false);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigensolver failed on the decaying block");
  }
  const double abscissa = solver.eigenvalues().real().maxCoeff();
  const double scale = std::max(1.0, restricted.norm());
  if (abscissa >= -tolerance::kEig * scale) {
    throw NumericalError("drift restricted to the decaying subspace is not Hurwitz");
  }
  return -2.0 * abscissa;
}

DecayFit fit_decay(const Trajectory& traj, double skip_fraction) {
  if (!(skip_fraction >= 0.0 && skip_fraction < 1.0)) {
    throw std::invalid_argument("skip_fraction must lie in [0, 1)");
  }
  if (traj.size() == 0) throw DegenerateFitError("empty trajectory");
  const double floor = 1e3 * std::numeric_limits<double>::min();
  const double t_first = skip_fraction * traj.times.back();

  std::vector<double> ts;
  std::vector<double> ys;
  for (std::size_t j = 0; j < traj.size(); ++j) {
    if (traj.times[j] < t_first) continue;
    if (!(traj.energies[j] > floor)) break;
    ts.push_back(traj.times[j]);
    ys.push_back(std::log(traj.energies[j]));
  }
  if (ts.size() < 10) {
    throw DegenerateFitError("decay fit needs at least 10 usable samples, got " +
                             std::to_string(ts.size()));
  }

  const double count = static_cast<double>(ts.size());
  double t_mean = 0.0;
  double y_mean = 0.0;
  for (std::size_t j = 0; j < ts.size(); ++j) {
    t_mean += ts[j];
    y_mean += ys[j];
  }
  t_mean /= count;
  y_mean /= count;
  double stt = 0.0;
  double sty = 0.0;
  double syy = 0.0;
  for (std::size_t j = 0; j < ts.size(); ++j) {
    stt += (ts[j] - t_mean) * (ts[j] - t_mean);
    sty += (ts[j] - t_mean) * (ys[j] - y_mean);
    syy += (ys[j] - y_mean) * (ys[j] - y_mean);
  }
  if (!(stt > 0.0)) throw DegenerateFitError("fit window has zero time extent");
  const double slope = sty / stt;
  const double intercept = y_mean - slope * t_mean;
  double ss_res = 0.0;
  for (std::size_t j = 0; j < ts.size(); ++j) {
    const double r = ys[j] - (intercept + slope * ts[j]);
    ss_res += r * r;
  }

  DecayFit fit;
  fit.c2_hat = -slope;
  fit.c1_hat = std::exp(intercept);
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  fit.t_start = ts.front();
  fit.t_end = ts.back();
  fit.samples = static_cast<int>(ts.size());
  return fit;
}

}  // namespace chainlab
