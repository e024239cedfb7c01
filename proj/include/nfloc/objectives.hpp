#pragma once

#include <span>

#include "nfloc/array.hpp"

namespace nfloc {

// Separation penalty settings for the sequential localizer. Distances
// between locations are measured in normalized units: radians over phi0
// (and psi0) and meters over r0, so the norm is dimensionless.
struct PenaltyConfig {
  double alpha = 1000.0;
  double delta_min = 0.08;
  double phi0 = 1.0;
  double psi0 = 1.0;
  double r0 = 1.0;
};

double normalized_distance(const SourceLocation& a, const SourceLocation& b,
                           const PenaltyConfig& cfg);

// Residual least-squares cost J(theta) = || (I - P_a) Y ||_F^2 for a
// single-source hypothesis, evaluated in the simplified inner-product form
// ||Y||_F^2 - |a^H Y|^2 / M (a has unit-modulus entries, so a^H a = M).
double rls_cost(const Eigen::MatrixXcd& snapshots, const SourceLocation& theta,
                const ArrayGeometry& geometry, double lambda, PhaseModel model);

// Same cost through an explicitly materialized rank-one projector; kept as
// an independent route for cross-checking the fast form.
double rls_cost_explicit(const Eigen::MatrixXcd& snapshots, const SourceLocation& theta,
                         const ArrayGeometry& geometry, double lambda, PhaseModel model);

// Repulsion term sum_i alpha * max(0, delta_min - d(theta, detected_i)).
double penalty(const SourceLocation& theta, std::span<const SourceLocation> detected,
               const PenaltyConfig& cfg);

double penalized_rls_cost(const Eigen::MatrixXcd& snapshots, const SourceLocation& theta,
                          std::span<const SourceLocation> detected, const PenaltyConfig& cfg,
                          const ArrayGeometry& geometry, double lambda, PhaseModel model);

// Eigen-subspace fitting cost J(x) = || (I - P_A(x)) U_s ||_F^2 for a joint
// K-source hypothesis, where A(x) stacks the candidate array responses and
// U_s carries K orthonormal signal-subspace columns. Candidates whose
// response matrix is numerically rank deficient (near-coincident sources)
// evaluate to +infinity rather than throwing, so optimizers can treat them
// as infeasible and move on.
double esf_cost(std::span<const SourceLocation> candidates, const Eigen::MatrixXcd& signal_basis,
                const ArrayGeometry& geometry, double lambda, PhaseModel model);

}  // namespace nfloc
