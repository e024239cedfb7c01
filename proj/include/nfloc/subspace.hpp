#pragma once

#include <Eigen/Dense>
#include <stdexcept>

namespace nfloc {

// Relative smallest/largest singular value below which a candidate basis is
// treated as rank deficient.
inline constexpr double kProjectorRankTol = 1e-10;

// Thrown by column_projector when the basis is numerically rank deficient.
// Carries the condition estimate (largest/smallest singular value).
class IllConditionedBasis : public std::runtime_error {
 public:
  explicit IllConditionedBasis(double condition)
      : std::runtime_error("column basis is numerically rank deficient"),
        condition_(condition) {}
  double condition() const { return condition_; }

 private:
  double condition_;
};

// Eigendecomposition of a Hermitian matrix with eigenvalues sorted
// descending and eigenvector columns aligned to them. Each column's phase
// is normalized (first non-negligible component made real positive) so
// repeated runs produce identical bases.
struct EigenDecomposition {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXcd eigenvectors;
};

// R = Y Y^H / T.
Eigen::MatrixXcd sample_covariance(const Eigen::MatrixXcd& snapshots);

EigenDecomposition eigendecompose_hermitian(const Eigen::MatrixXcd& hermitian);

// Orthonormal basis for the K-dimensional dominant eigenspace of R.
// If the K-th and (K+1)-th eigenvalues coincide within 1e-12 the split is
// ambiguous; `degenerate` (when given) is set and the deterministic
// ordering of eigendecompose_hermitian decides the basis.
Eigen::MatrixXcd signal_subspace(const Eigen::MatrixXcd& covariance, int k,
                                 bool* degenerate = nullptr);

// Orthonormal basis for the (M-K)-dimensional minor eigenspace of R.
Eigen::MatrixXcd noise_subspace(const Eigen::MatrixXcd& covariance, int k);

// Orthogonal projector onto the column space of A, P = A (A^H A)^-1 A^H,
// built from a thin SVD. Throws IllConditionedBasis when the smallest
// singular value falls below kProjectorRankTol times the largest.
Eigen::MatrixXcd column_projector(const Eigen::MatrixXcd& basis);

// Y minus its projection onto span(a): Y - a (a^H Y) / (a^H a).
Eigen::MatrixXcd residual_project(const Eigen::MatrixXcd& snapshots, const Eigen::VectorXcd& a);

}  // namespace nfloc
