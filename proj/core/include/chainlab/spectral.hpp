#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "chainlab/chain_model.hpp"

namespace chainlab {

/// Relative tolerances shared by the spectral checks.
namespace tolerance {
inline constexpr double kEig = 1e-10;
inline constexpr double kOrth = 1e-10;
inline constexpr double kGapRelative = 1e-12;
inline constexpr double kEnergy = 1e-10;
inline constexpr double kKrylovRank = 1e-9;
}  // namespace tolerance

/// Raised when the eigensolver fails or a spectrum cannot be certified simple.
class SpectralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Eigenpairs of V, eigenvalues ascending, unit-norm eigenvectors as columns.
///
/// Column k pairs with eigenvalue k, which for the chain is the mode with
/// wave number k = 0..N-1.
struct SpectralData {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;

  int size() const { return static_cast<int>(eigenvalues.size()); }
};

/// Orthonormal bases of the conserved subspace L0 and the decaying subspace L-.
///
/// Both bases consist of pairs (v_k, 0), (0, v_k) of eigenmodes of V; a mode
/// goes to L0 exactly when it vanishes at the dissipating site.
struct SubspaceSplit {
  std::vector<PhaseState> conserved_basis;
  std::vector<PhaseState> decaying_basis;
  int dim_conserved = 0;
  std::vector<int> conserved_modes;
  std::vector<int> decaying_modes;

  /// Basis vectors stacked as columns of a 2N x dim matrix.
  Eigen::MatrixXd conserved_matrix() const;
  Eigen::MatrixXd decaying_matrix() const;
};

/// Eigenpairs from lambda_k = w0 + 2 w1 (1 - cos(pi k / N)) and the cosine
/// modes y_j = cos(pi (j - 1/2) k / N), normalised.
SpectralData closed_form_spectrum(const ChainParams& params);

/// Eigenpairs of an arbitrary symmetric V from a dense symmetric solver. Each
/// eigenvector's sign is fixed so that its first non-negligible entry is
/// positive.
SpectralData numeric_spectrum(const StiffnessMatrix& V);

/// Number of k in 0..N-1 with k (2n - 1) = N (mod 2N), i.e. the modes whose
/// cosine vanishes at site n. Exact integer test.
int zero_component_count(int N, int n);

/// dim L0 as twice the number of modes orthogonal to e_n.
int dim_L0_spectral(const ChainParams& params);

/// Dimension of span{V^j e_n}, by Lanczos with full double
/// re-orthogonalisation. A direction is accepted while its residual exceeds
/// `rank_tol` times the norm of the vector before projection.
int krylov_dim(const StiffnessMatrix& V, int n, double rank_tol = tolerance::kKrylovRank);

/// Splits phase space using the modes of `spec`. Throws SpectralError when two
/// eigenvalues are closer than 1e-12 * lambda_max.
SubspaceSplit split_subspaces(const ChainParams& params, const SpectralData& spec);

/// Returns (psi0, psi2): the energy-orthogonal projection onto L0 and the
/// remainder, which lies in L-.
std::pair<PhaseState, PhaseState> project(const PhaseState& state, const SubspaceSplit& split,
                                          const StiffnessMatrix& V);

/// Assembles I, Q and Gamma explicitly and tests A == I Q - alpha Gamma to a
/// relative 1e-10.
bool operator_identity_check(const ChainParams& params);
bool operator_identity_check(const ChainParams& params, const DriftMatrix& A);

/// Largest |V y - lambda y| over all pairs, relative to lambda_max.
double max_eigen_residual(const StiffnessMatrix& V, const SpectralData& spec);

}  // namespace chainlab
