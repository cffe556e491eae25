#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "chainlab/chain_model.hpp"
#include "chainlab/spectral.hpp"

namespace chainlab {

namespace tolerance {
/// Slack for energy monotonicity and L0 persistence along trajectories.
inline constexpr double kDyn = 1e-6;
}  // namespace tolerance

/// Fixed-step integration requires dt * sqrt(lambda_max) <= this bound.
inline constexpr double kStepStabilityBound = 0.1;
/// Eigenvector condition number above which propagation switches to Pade.
inline constexpr double kEigenConditionLimit = 1e8;

/// Requested step is too coarse for the fastest mode.
class StepSizeError : public std::invalid_argument {
 public:
  StepSizeError(double requested, double admissible);
  double requested() const { return requested_; }
  double admissible() const { return admissible_; }

 private:
  double requested_;
  double admissible_;
};

/// Non-finite state or an inconsistency that indicates a numerical bug.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateFitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Time-sampled solution of psi' = A psi with energies and dissipation powers.
struct Trajectory {
  std::vector<double> times;
  std::vector<PhaseState> states;
  std::vector<double> energies;
  std::vector<double> powers;

  std::size_t size() const { return times.size(); }
  void push(double t, PhaseState state, const StiffnessMatrix& V, const ChainParams& params);
};

/// Log-linear fit H(t) ~ c1 exp(-c2 t) over [t_start, t_end].
struct DecayFit {
  double c2_hat = 0.0;
  double c1_hat = 0.0;
  double r_squared = 0.0;
  double t_start = 0.0;
  double t_end = 0.0;
  int samples = 0;
};

enum class PropagationMethod {
  kAuto,   // eigendecomposition unless ill-conditioned, else Pade
  kEigen,  // complex eigendecomposition of A
  kPade,   // scaling and squaring
};

/// Evaluates e^{tA} psi for a fixed drift matrix.
///
/// The complex eigendecomposition A = X diag(mu) X^-1 is computed once; when
/// cond(X) >= 1e8 (A close to defective) the propagator falls back to Pade
/// scaling and squaring for every evaluation.
class ExactPropagator {
 public:
  explicit ExactPropagator(const DriftMatrix& A,
                           PropagationMethod method = PropagationMethod::kAuto);

  PhaseState operator()(const PhaseState& psi0, double t) const;

  /// e^{t_j A} psi0 at t_j = j * dt for every j in 0..steps that is a multiple
  /// of `stride`, plus j = steps.
  std::vector<PhaseState> sample(const PhaseState& psi0, double dt, int steps,
                                 int stride = 1) const;

  PropagationMethod method() const { return method_; }
  double eigenvector_condition() const { return condition_; }
  const Eigen::VectorXcd& eigenvalues() const { return mu_; }

 private:
  Eigen::MatrixXd A_;
  PropagationMethod method_;
  double condition_ = 0.0;
  Eigen::VectorXcd mu_;
  Eigen::MatrixXcd X_;
  Eigen::MatrixXcd X_inv_;
};

/// e^{tA} psi0 for t >= 0.
PhaseState exact_propagate(const DriftMatrix& A, const PhaseState& psi0, double t,
                           PropagationMethod method = PropagationMethod::kAuto);

/// dt = 0.1 / sqrt(lambda_max), the coarsest step the integrator accepts.
double default_time_step(const ChainParams& params);

/// Classical RK4 on [0, t_end]. The step is shrunk to t_end / ceil(t_end / dt)
/// so that the grid ends exactly at t_end; every `stride`-th step and the last
/// one are recorded. Throws StepSizeError when dt * sqrt(lambda_max) > 0.1.
Trajectory integrate(const ChainParams& params, const PhaseState& psi0, double t_end,
                     double dt, int stride = 1);

/// Same grid as integrate(), but states come from the exact propagator.
Trajectory propagate_trajectory(const ChainParams& params, const PhaseState& psi0,
                                double t_end, double dt, int stride = 1,
                                PropagationMethod method = PropagationMethod::kAuto);

/// Max |central-difference dH/dt - power| over interior samples, normalised by
/// max(max |power|, H(0) / t_end).
double verify_dissipation_identity(const Trajectory& traj, const ChainParams& params);

/// c2 = -2 * max Re(mu) over the spectrum of A restricted to L-.
/// Throws NumericalError if the restriction is not Hurwitz.
double theoretical_decay_rate(const ChainParams& params, const SubspaceSplit& split);

/// Least-squares line through log H over t >= skip_fraction * t_end, stopping at
/// the first sample below 1e3 times the smallest normal double.
DecayFit fit_decay(const Trajectory& traj, double skip_fraction = 0.5);

}  // namespace chainlab
