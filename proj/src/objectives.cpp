#include "nfloc/objectives.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <limits>

#include "nfloc/subspace.hpp"

namespace nfloc {

double normalized_distance(const SourceLocation& a, const SourceLocation& b,
                           const PenaltyConfig& cfg) {
  const double dphi = (a.phi - b.phi) / cfg.phi0;
  const double dr = (a.range - b.range) / cfg.r0;
  double sum = dphi * dphi + dr * dr;
  if (a.has_elevation() && b.has_elevation()) {
    const double dpsi = (*a.psi - *b.psi) / cfg.psi0;
    sum += dpsi * dpsi;
  }
  return std::sqrt(sum);
}

double rls_cost(const Eigen::MatrixXcd& snapshots, const SourceLocation& theta,
                const ArrayGeometry& geometry, double lambda, PhaseModel model) {
  const Eigen::VectorXcd a = steering_vector(geometry, theta, lambda, model);
  const double projected = (a.adjoint() * snapshots).squaredNorm() / a.squaredNorm();
  // Cancellation can leave a tiny negative residual when the fit is exact.
  return std::max(snapshots.squaredNorm() - projected, 0.0);
}

double rls_cost_explicit(const Eigen::MatrixXcd& snapshots, const SourceLocation& theta,
                         const ArrayGeometry& geometry, double lambda, PhaseModel model) {
  const Eigen::VectorXcd a = steering_vector(geometry, theta, lambda, model);
  const Eigen::MatrixXcd projector = column_projector(a);
  return (snapshots - projector * snapshots).squaredNorm();
}

double penalty(const SourceLocation& theta, std::span<const SourceLocation> detected,
               const PenaltyConfig& cfg) {
  double total = 0.0;
  for (const SourceLocation& mode : detected) {
    total += cfg.alpha * std::max(0.0, cfg.delta_min - normalized_distance(theta, mode, cfg));
  }
  return total;
}

double penalized_rls_cost(const Eigen::MatrixXcd& snapshots, const SourceLocation& theta,
                          std::span<const SourceLocation> detected, const PenaltyConfig& cfg,
                          const ArrayGeometry& geometry, double lambda, PhaseModel model) {
  return rls_cost(snapshots, theta, geometry, lambda, model) + penalty(theta, detected, cfg);
}

double esf_cost(std::span<const SourceLocation> candidates, const Eigen::MatrixXcd& signal_basis,
                const ArrayGeometry& geometry, double lambda, PhaseModel model) {
  const int m = geometry.element_count();
  const auto k = static_cast<Eigen::Index>(candidates.size());
  Eigen::MatrixXcd responses(m, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    responses.col(j) = steering_vector(geometry, candidates[j], lambda, model);
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(responses, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  if (!(sv(k - 1) > kProjectorRankTol * sv(0))) {
    return std::numeric_limits<double>::infinity();
  }
  const Eigen::MatrixXcd projector = svd.matrixU() * svd.matrixU().adjoint();
  return (signal_basis - projector * signal_basis).squaredNorm();
}

}  // namespace nfloc
