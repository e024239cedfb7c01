#include "nfloc/subspace.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

namespace nfloc {

Eigen::MatrixXcd sample_covariance(const Eigen::MatrixXcd& snapshots) {
  if (snapshots.size() == 0) throw std::invalid_argument("empty snapshot matrix");
  const auto t = static_cast<double>(snapshots.cols());
  Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(snapshots.rows(), snapshots.rows());
  r.selfadjointView<Eigen::Lower>().rankUpdate(snapshots, 1.0 / t);
  r.triangularView<Eigen::StrictlyUpper>() = r.adjoint();
  return r;
}

EigenDecomposition eigendecompose_hermitian(const Eigen::MatrixXcd& hermitian) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(hermitian);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("Hermitian eigendecomposition failed to converge");
  }
  const Eigen::Index m = hermitian.rows();
  EigenDecomposition out;
  out.eigenvalues = solver.eigenvalues().reverse();
  out.eigenvectors.resize(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    out.eigenvectors.col(j) = solver.eigenvectors().col(m - 1 - j);
    // Phase convention: first component with non-negligible magnitude made
    // real positive, so eigenbases are reproducible even under ties.
    for (Eigen::Index i = 0; i < m; ++i) {
      const std::complex<double> v = out.eigenvectors(i, j);
      if (std::abs(v) > 1e-12) {
        out.eigenvectors.col(j) *= std::conj(v) / std::abs(v);
        break;
      }
    }
  }
  return out;
}

Eigen::MatrixXcd signal_subspace(const Eigen::MatrixXcd& covariance, int k, bool* degenerate) {
  const Eigen::Index m = covariance.rows();
  if (k < 1 || k >= m) throw std::invalid_argument("need 1 <= k < M");
  const EigenDecomposition eig = eigendecompose_hermitian(covariance);
  if (degenerate != nullptr) {
    *degenerate = std::abs(eig.eigenvalues(k - 1) - eig.eigenvalues(k)) < 1e-12;
  }
  return eig.eigenvectors.leftCols(k);
}

Eigen::MatrixXcd noise_subspace(const Eigen::MatrixXcd& covariance, int k) {
  const Eigen::Index m = covariance.rows();
  if (k < 0 || k >= m) throw std::invalid_argument("need 0 <= k < M");
  return eigendecompose_hermitian(covariance).eigenvectors.rightCols(m - k);
}

Eigen::MatrixXcd column_projector(const Eigen::MatrixXcd& basis) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(basis, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  const double smin = sv(sv.size() - 1);
  if (!(smin > kProjectorRankTol * smax)) {
    throw IllConditionedBasis(smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity());
  }
  return svd.matrixU() * svd.matrixU().adjoint();
}

Eigen::MatrixXcd residual_project(const Eigen::MatrixXcd& snapshots, const Eigen::VectorXcd& a) {
  const double norm2 = a.squaredNorm();
  if (!(norm2 > 0.0)) throw std::invalid_argument("projection vector must be nonzero");
  return snapshots - a * (a.adjoint() * snapshots) / norm2;
}

}  // namespace nfloc
