#include "chainlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

namespace chainlab {
namespace {

// cos(pi k (n - 1/2) / N) == 0  <=>  k (2n - 1) == N (mod 2N).
bool mode_vanishes_at(std::int64_t N, std::int64_t n, std::int64_t k) {
  return (k * (2 * n - 1)) % (2 * N) == N % (2 * N);
}

bool is_tridiagonal(const Eigen::MatrixXd& M) {
  for (Eigen::Index j = 0; j < M.cols(); ++j) {
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
      if ((i > j + 1 || j > i + 1) && M(i, j) != 0.0) return false;
    }
  }
  return true;
}

Eigen::MatrixXd stack_columns(const std::vector<PhaseState>& basis, int N) {
  Eigen::MatrixXd W(2 * N, static_cast<Eigen::Index>(basis.size()));
  for (std::size_t c = 0; c < basis.size(); ++c) {
    W.col(static_cast<Eigen::Index>(c)) = basis[c].stacked();
  }
  return W;
}

}  // namespace

Eigen::MatrixXd SubspaceSplit::conserved_matrix() const {
  const int N = conserved_basis.empty() ? decaying_basis.front().size()
                                        : conserved_basis.front().size();
  return stack_columns(conserved_basis, N);
}

Eigen::MatrixXd SubspaceSplit::decaying_matrix() const {
  const int N = decaying_basis.empty() ? conserved_basis.front().size()
                                       : decaying_basis.front().size();
  return stack_columns(decaying_basis, N);
}

SpectralData closed_form_spectrum(const ChainParams& params) {
  params.validate();
  const int N = params.N;
  SpectralData spec;
  spec.eigenvalues.resize(N);
  spec.eigenvectors.resize(N, N);
  for (int k = 0; k < N; ++k) {
    const double theta = std::numbers::pi * k / N;
    spec.eigenvalues(k) = params.omega0 + 2.0 * params.omega1 * (1.0 - std::cos(theta));
    for (int j = 0; j < N; ++j) {
      spec.eigenvectors(j, k) = std::cos(theta * (j + 0.5));
    }
    spec.eigenvectors.col(k).normalize();
  }
  return spec;
}

SpectralData numeric_spectrum(const StiffnessMatrix& V) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(V.matrix());
  if (solver.info() != Eigen::Success) {
    throw SpectralError("symmetric eigensolver did not converge");
  }
  SpectralData spec{solver.eigenvalues(), solver.eigenvectors()};
  for (int k = 0; k < spec.size(); ++k) {
    auto col = spec.eigenvectors.col(k);
    for (Eigen::Index j = 0; j < col.size(); ++j) {
      if (std::abs(col(j)) > 1e-8) {
        if (col(j) < 0.0) col = -col;
        break;
      }
    }
  }
  return spec;
}

int zero_component_count(int N, int n) {
  if (N < 1 || n < 1 || n > N) {
    throw std::invalid_argument("zero_component_count needs 1 <= n <= N");
  }
  int count = 0;
  for (int k = 0; k < N; ++k) {
    if (mode_vanishes_at(N, n, k)) ++count;
  }
  return count;
}

int dim_L0_spectral(const ChainParams& params) {
  params.validate();
  return 2 * zero_component_count(params.N, params.n);
}

int krylov_dim(const StiffnessMatrix& V, int n, double rank_tol) {
  const int N = V.size();
  if (n < 1 || n > N) {
    throw std::invalid_argument("krylov_dim needs 1 <= n <= N");
  }
  const Eigen::MatrixXd& M = V.matrix();
  const bool banded = is_tridiagonal(M);
  const Eigen::VectorXd diag = M.diagonal();
  const Eigen::VectorXd off = N > 1 ? Eigen::VectorXd(M.diagonal(1)) : Eigen::VectorXd();

  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(N, N);
  basis(n - 1, 0) = 1.0;
  int dim = 1;
  double largest = 1.0;
  Eigen::VectorXd w(N);
  Eigen::VectorXd coeffs(N);
  while (dim < N) {
    const auto last = basis.col(dim - 1);
    if (banded) {
      w = diag.cwiseProduct(last);
      w.head(N - 1) += off.cwiseProduct(last.tail(N - 1));
      w.tail(N - 1) += off.cwiseProduct(last.head(N - 1));
    } else {
      w.noalias() = M * last;
    }
    largest = std::max(largest, w.norm());
    const auto accepted = basis.leftCols(dim);
    for (int pass = 0; pass < 2; ++pass) {
      coeffs.head(dim).noalias() = accepted.transpose() * w;
      w.noalias() -= accepted * coeffs.head(dim);
    }
    const double residual = w.norm();
    if (residual <= rank_tol * largest) break;
    basis.col(dim) = w / residual;
    ++dim;
  }
  return dim;
}

SubspaceSplit split_subspaces(const ChainParams& params, const SpectralData& spec) {
  params.validate();
  const int N = params.N;
  if (spec.size() != N || spec.eigenvectors.rows() != N || spec.eigenvectors.cols() != N) {
    throw std::invalid_argument("spectral data does not match chain size");
  }
  const double lambda_max = spec.eigenvalues.cwiseAbs().maxCoeff();
  for (int k = 0; k + 1 < N; ++k) {
    const double gap = spec.eigenvalues(k + 1) - spec.eigenvalues(k);
    if (gap < tolerance::kGapRelative * lambda_max) {
      throw SpectralError("eigenvalues " + std::to_string(k) + " and " +
                          std::to_string(k + 1) + " are not separated; spectrum not simple");
    }
  }

  SubspaceSplit split;
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(N);
  for (int k = 0; k < N; ++k) {
    const Eigen::VectorXd v = spec.eigenvectors.col(k);
    const bool conserved = mode_vanishes_at(N, params.n, k);
    auto& basis = conserved ? split.conserved_basis : split.decaying_basis;
    basis.emplace_back(v, zero);
    basis.emplace_back(zero, v);
    (conserved ? split.conserved_modes : split.decaying_modes).push_back(k);
  }
  split.dim_conserved = static_cast<int>(split.conserved_basis.size());
  return split;
}

std::pair<PhaseState, PhaseState> project(const PhaseState& state, const SubspaceSplit& split,
                                          const StiffnessMatrix& V) {
  const int N = V.size();
  if (state.size() != N) {
    throw std::invalid_argument("state dimension does not match stiffness matrix");
  }
  if (split.conserved_basis.size() + split.decaying_basis.size() !=
      static_cast<std::size_t>(2 * N)) {
    throw std::invalid_argument("subspace split does not match stiffness matrix");
  }
  // The conserved q- and p-parts are eigenvectors of V, hence orthogonal in
  // both (V., .) and (., .); project q in the energy product and p in the plain one.
  PhaseState conserved = PhaseState::zero(N);
  const Eigen::VectorXd Vq = V.matrix() * state.q;
  for (const PhaseState& b : split.conserved_basis) {
    if (b.q.squaredNorm() > 0.0) {
      const Eigen::VectorXd Vb = V.matrix() * b.q;
      conserved.q += (Vq.dot(b.q) / Vb.dot(b.q)) * b.q;
    } else {
      conserved.p += (state.p.dot(b.p) / b.p.squaredNorm()) * b.p;
    }
  }
  PhaseState decaying(state.q - conserved.q, state.p - conserved.p);
  return {std::move(conserved), std::move(decaying)};
}

bool operator_identity_check(const ChainParams& params) {
  const StiffnessMatrix V = build_stiffness(params);
  return operator_identity_check(params, build_drift(params, V));
}

bool operator_identity_check(const ChainParams& params, const DriftMatrix& A) {
  const int N = params.N;
  if (A.particles() != N) return false;
  const StiffnessMatrix V = build_stiffness(params);

  // I(q, p) = (p, -q)
  Eigen::MatrixXd I = Eigen::MatrixXd::Zero(2 * N, 2 * N);
  I.topRightCorner(N, N).setIdentity();
  I.bottomLeftCorner(N, N) = -Eigen::MatrixXd::Identity(N, N);
  // Q(q, p) = (Vq, p)
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(2 * N, 2 * N);
  Q.topLeftCorner(N, N) = V.matrix();
  Q.bottomRightCorner(N, N).setIdentity();
  // Gamma psi = (psi, g_n) g_n with g_n = (0, e_n)
  Eigen::VectorXd g = Eigen::VectorXd::Zero(2 * N);
  g(N + params.n - 1) = 1.0;
  const Eigen::MatrixXd Gamma = g * g.transpose();

  const Eigen::MatrixXd rebuilt = I * Q - params.alpha * Gamma;
  const double scale = std::max(1.0, A.matrix().norm());
  return (A.matrix() - rebuilt).norm() <= tolerance::kEig * scale;
}

double max_eigen_residual(const StiffnessMatrix& V, const SpectralData& spec) {
  const double lambda_max = std::max(1.0, spec.eigenvalues.cwiseAbs().maxCoeff());
  double worst = 0.0;
  for (int k = 0; k < spec.size(); ++k) {
    const auto y = spec.eigenvectors.col(k);
    worst = std::max(worst, (V.matrix() * y - spec.eigenvalues(k) * y).norm());
  }
  return worst / lambda_max;
}

}  // namespace chainlab
