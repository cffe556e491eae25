#include "chainlab/chain_model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace chainlab {

void ChainParams::validate() const {
  if (N < 1) {
    throw std::invalid_argument("chain needs N >= 1 particles, got " + std::to_string(N));
  }
  if (n < 1 || n > N) {
    throw std::invalid_argument("dissipating index n=" + std::to_string(n) +
                                " outside 1.." + std::to_string(N));
  }
  if (!std::isfinite(alpha) || !std::isfinite(omega0) || !std::isfinite(omega1)) {
    throw std::invalid_argument("chain parameters must be finite");
  }
  if (!(omega0 > 0.0)) {
    throw std::invalid_argument("omega0 must be positive");
  }
  if (allow_degenerate) {
    if (alpha < 0.0 || omega1 < 0.0) {
      throw std::invalid_argument("alpha and omega1 must be non-negative");
    }
  } else if (!(alpha > 0.0) || !(omega1 > 0.0)) {
    throw std::invalid_argument("alpha and omega1 must be positive");
  }
}

PhaseState::PhaseState(Eigen::VectorXd q_in, Eigen::VectorXd p_in)
    : q(std::move(q_in)), p(std::move(p_in)) {
  if (q.size() != p.size()) {
    throw std::invalid_argument("q and p must have equal length");
  }
}

PhaseState PhaseState::zero(int N) {
  return {Eigen::VectorXd::Zero(N), Eigen::VectorXd::Zero(N)};
}

PhaseState PhaseState::from_stacked(const Eigen::Ref<const Eigen::VectorXd>& psi) {
  if (psi.size() % 2 != 0) {
    throw std::invalid_argument("stacked phase vector must have even length");
  }
  const auto N = psi.size() / 2;
  return {psi.head(N), psi.tail(N)};
}

Eigen::VectorXd PhaseState::stacked() const {
  Eigen::VectorXd psi(2 * q.size());
  psi << q, p;
  return psi;
}

bool PhaseState::all_finite() const { return q.allFinite() && p.allFinite(); }

StiffnessMatrix::StiffnessMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() < 1) {
    throw std::invalid_argument("stiffness matrix must be square and non-empty");
  }
}

DriftMatrix::DriftMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() % 2 != 0 || entries_.rows() < 2) {
    throw std::invalid_argument("drift matrix must be square with even dimension");
  }
}

PhaseState DriftMatrix::apply(const PhaseState& psi) const {
  if (psi.size() != particles()) {
    throw std::invalid_argument("state dimension does not match drift matrix");
  }
  return PhaseState::from_stacked(entries_ * psi.stacked());
}

StiffnessMatrix build_stiffness(const ChainParams& params) {
  params.validate();
  const int N = params.N;
  const double w0 = params.omega0;
  const double w1 = params.omega1;
  Eigen::MatrixXd V = Eigen::MatrixXd::Zero(N, N);
  for (int i = 0; i < N; ++i) {
    // Each bond to an existing neighbour contributes w1 to the diagonal.
    int bonds = (i > 0 ? 1 : 0) + (i + 1 < N ? 1 : 0);
    V(i, i) = w0 + bonds * w1;
    if (i + 1 < N) {
      V(i, i + 1) = -w1;
      V(i + 1, i) = -w1;
    }
  }
  return StiffnessMatrix(std::move(V));
}

DriftMatrix build_drift(const ChainParams& params, const StiffnessMatrix& V) {
  params.validate();
  const int N = params.N;
  if (V.size() != N) {
    throw std::invalid_argument("stiffness matrix is " + std::to_string(V.size()) +
                                "x" + std::to_string(V.size()) + " but N=" +
                                std::to_string(N));
  }
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * N, 2 * N);
  A.topRightCorner(N, N).setIdentity();
  A.bottomLeftCorner(N, N) = -V.matrix();
  A(N + params.n - 1, N + params.n - 1) = -params.alpha;
  return DriftMatrix(std::move(A));
}

double energy(const PhaseState& state, const StiffnessMatrix& V) {
  if (state.size() != V.size() || state.p.size() != V.size()) {
    throw std::invalid_argument("state dimension does not match stiffness matrix");
  }
  const double kinetic = 0.5 * state.p.squaredNorm();
  const double potential = 0.5 * state.q.dot(V.matrix() * state.q);
  return kinetic + potential;
}

double power_dissipated(const PhaseState& state, const ChainParams& params) {
  if (state.size() != params.N) {
    throw std::invalid_argument("state dimension does not match chain size");
  }
  const double pn = state.p(params.n - 1);
  return -params.alpha * pn * pn;
}

double max_stiffness_eigenvalue(const ChainParams& params) {
  const double k = params.N - 1;
  return params.omega0 +
         2.0 * params.omega1 * (1.0 - std::cos(std::numbers::pi * k / params.N));
}

}  // namespace chainlab
