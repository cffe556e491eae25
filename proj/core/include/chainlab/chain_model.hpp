#pragma once

#include <Eigen/Dense>

namespace chainlab {

/// Parameters of a harmonic chain with friction on a single particle.
///
/// The chain has `N` unit-mass particles with pinning stiffness `omega0` and
/// nearest-neighbour coupling `omega1`. Particle `n` (1-based) feels the
/// friction force `-alpha * p_n`.
struct ChainParams {
  int N = 1;
  int n = 1;
  double alpha = 1.0;
  double omega0 = 1.0;
  double omega1 = 1.0;
  // Permits alpha == 0 and omega1 == 0 (Hamiltonian or decoupled test systems).
  bool allow_degenerate = false;

  /// Throws std::invalid_argument when any invariant is violated.
  void validate() const;
};

/// A point (q, p) of the 2N-dimensional phase space, in deviation coordinates.
struct PhaseState {
  Eigen::VectorXd q;
  Eigen::VectorXd p;

  PhaseState() = default;
  PhaseState(Eigen::VectorXd q_in, Eigen::VectorXd p_in);

  static PhaseState zero(int N);
  /// Splits a stacked (q, p) vector of even length.
  static PhaseState from_stacked(const Eigen::Ref<const Eigen::VectorXd>& psi);

  int size() const { return static_cast<int>(q.size()); }
  Eigen::VectorXd stacked() const;
  bool all_finite() const;
};

/// Symmetric tridiagonal stiffness matrix of the chain.
class StiffnessMatrix {
 public:
  explicit StiffnessMatrix(Eigen::MatrixXd entries);

  const Eigen::MatrixXd& matrix() const { return entries_; }
  int size() const { return static_cast<int>(entries_.rows()); }
  double operator()(int i, int j) const { return entries_(i, j); }

 private:
  Eigen::MatrixXd entries_;
};

/// Generator of the linear flow psi' = A psi, stored as the dense 2N x 2N
/// block matrix (0 E; -V -D).
class DriftMatrix {
 public:
  explicit DriftMatrix(Eigen::MatrixXd entries);

  const Eigen::MatrixXd& matrix() const { return entries_; }
  /// Number of particles (half the phase-space dimension).
  int particles() const { return static_cast<int>(entries_.rows() / 2); }

  PhaseState apply(const PhaseState& psi) const;

 private:
  Eigen::MatrixXd entries_;
};

StiffnessMatrix build_stiffness(const ChainParams& params);

/// Throws std::invalid_argument if `V` was not built for `params.N` particles.
DriftMatrix build_drift(const ChainParams& params, const StiffnessMatrix& V);

/// H = T + U = 0.5 |p|^2 + 0.5 q^T V q.
double energy(const PhaseState& state, const StiffnessMatrix& V);

/// Instantaneous energy change dH/dt = -alpha p_n^2.
double power_dissipated(const PhaseState& state, const ChainParams& params);

/// Largest eigenvalue of the chain stiffness matrix, from the cosine formula.
double max_stiffness_eigenvalue(const ChainParams& params);

}  // namespace chainlab
