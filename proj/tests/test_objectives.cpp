#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nfloc/channel.hpp"
#include "nfloc/objectives.hpp"
#include "nfloc/subspace.hpp"

using namespace nfloc;

namespace {

double deg(double d) { return d * std::numbers::pi / 180.0; }

Eigen::MatrixXcd random_matrix(int rows, int cols, Rng& rng) {
  Eigen::MatrixXcd m(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) m(i, j) = rng.complex_normal();
  }
  return m;
}

SnapshotMatrix noiseless_los(const ArrayGeometry& geometry, double lambda,
                             const std::vector<SourceSpec>& sources, int snapshots,
                             std::uint64_t seed) {
  Scenario scenario{geometry, lambda, sources, snapshots, ChannelModel::pure_los(), seed, true};
  return simulate_snapshots(scenario);
}

}  // namespace

TEST_CASE("residual least-squares cost") {
  const ArrayGeometry g = ArrayGeometry::ula(16, 0.005);
  const double lambda = 0.02;
  Rng rng(5);

  SUBCASE("vanishes when the candidate matches noiseless single-source data") {
    const SourceLocation truth{deg(25.0), 4.0};
    const SnapshotMatrix snap = noiseless_los(g, lambda, {{truth, 10.0}}, 32, 1);
    const double cost = rls_cost(snap.data, truth, g, lambda, PhaseModel::Fresnel);
    CHECK(cost < 1e-10 * snap.data.squaredNorm());
  }

  SUBCASE("equals the full energy for orthogonal data") {
    const SourceLocation theta{deg(-10.0), 3.0};
    const Eigen::VectorXcd a = steering_vector(g, theta, lambda, PhaseModel::Fresnel);
    Eigen::MatrixXcd y = random_matrix(16, 8, rng);
    y -= a * (a.adjoint() * y) / a.squaredNorm();
    CHECK(rls_cost(y, theta, g, lambda, PhaseModel::Fresnel) ==
          doctest::Approx(y.squaredNorm()).epsilon(1e-9));
  }

  SUBCASE("matches the materialized-projector route") {
    for (int rep = 0; rep < 20; ++rep) {
      const Eigen::MatrixXcd y = random_matrix(16, 8, rng);
      const SourceLocation theta{rng.uniform(-1.0, 1.0), rng.uniform(1.0, 20.0)};
      const double fast = rls_cost(y, theta, g, lambda, PhaseModel::Fresnel);
      const double explicit_route = rls_cost_explicit(y, theta, g, lambda, PhaseModel::Fresnel);
      CHECK(fast == doctest::Approx(explicit_route).epsilon(1e-10));
    }
  }

  SUBCASE("closed-form identity over random draws") {
    for (int rep = 0; rep < 500; ++rep) {
      const Eigen::MatrixXcd y = random_matrix(16, 4, rng);
      const SourceLocation theta{rng.uniform(-1.2, 1.2), rng.uniform(0.5, 30.0)};
      const Eigen::VectorXcd a = steering_vector(g, theta, lambda, PhaseModel::Fresnel);
      const double expected = y.squaredNorm() - (a.adjoint() * y).squaredNorm() / 16.0;
      const double cost = rls_cost(y, theta, g, lambda, PhaseModel::Fresnel);
      CHECK(std::abs(cost - expected) < 1e-9 * y.squaredNorm());
      CHECK(cost >= 0.0);
      CHECK(cost <= y.squaredNorm() * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("separation penalty") {
  const PenaltyConfig cfg{1000.0, 0.08, 1.0, 1.0, 1.0};

  SUBCASE("no detections, no penalty") {
    CHECK(penalty({0.1, 2.0}, {}, cfg) == 0.0);
  }

  SUBCASE("hinge value at a known distance") {
    // normalized distance 0.05 -> 1000 * (0.08 - 0.05) = 30
    const SourceLocation detected{0.2, 3.0};
    const SourceLocation theta{0.2 + 0.03, 3.0 + 0.04};
    CHECK(normalized_distance(theta, detected, cfg) == doctest::Approx(0.05));
    const SourceLocation modes[] = {detected};
    CHECK(penalty(theta, modes, cfg) == doctest::Approx(30.0));
  }

  SUBCASE("inactive outside the separation ball") {
    const SourceLocation modes[] = {SourceLocation{0.0, 2.0}, SourceLocation{0.5, 9.0}};
    CHECK(penalty({0.0, 2.5}, modes, cfg) == 0.0);
  }

  SUBCASE("continuous at the hinge") {
    const SourceLocation detected{0.0, 2.0};
    const SourceLocation modes[] = {detected};
    for (double scale : {0.999, 1.0, 1.001}) {
      const SourceLocation theta{0.0, 2.0 + cfg.delta_min * scale};
      const double value = penalty(theta, modes, cfg);
      CHECK(value <= cfg.alpha * cfg.delta_min * 0.002 + 1e-9);
      if (scale >= 1.0) CHECK(value == 0.0);
    }
  }
}

TEST_CASE("penalized cost") {
  const ArrayGeometry g = ArrayGeometry::ula(8, 0.005);
  const double lambda = 0.02;
  const PenaltyConfig cfg;
  Rng rng(9);
  const Eigen::MatrixXcd y = random_matrix(8, 6, rng);

  SUBCASE("reduces to the data term with no detections") {
    const SourceLocation theta{0.3, 2.0};
    CHECK(penalized_rls_cost(y, theta, {}, cfg, g, lambda, PhaseModel::Fresnel) ==
          rls_cost(y, theta, g, lambda, PhaseModel::Fresnel));
  }

  SUBCASE("coincident candidate pays alpha * delta_min per coincident mode") {
    const SourceLocation theta{0.3, 2.0};
    const SourceLocation modes[] = {theta, theta};
    const double expected = rls_cost(y, theta, g, lambda, PhaseModel::Fresnel) +
                            2.0 * cfg.alpha * cfg.delta_min;
    CHECK(penalized_rls_cost(y, theta, modes, cfg, g, lambda, PhaseModel::Fresnel) ==
          doctest::Approx(expected));
  }

  SUBCASE("never below the data term") {
    const SourceLocation modes[] = {SourceLocation{0.31, 2.02}};
    for (int rep = 0; rep < 50; ++rep) {
      const SourceLocation theta{rng.uniform(-1.0, 1.0), rng.uniform(1.0, 5.0)};
      CHECK(penalized_rls_cost(y, theta, modes, cfg, g, lambda, PhaseModel::Fresnel) >=
            rls_cost(y, theta, g, lambda, PhaseModel::Fresnel));
    }
  }
}

TEST_CASE("eigen-subspace fitting cost") {
  const ArrayGeometry g = ArrayGeometry::ula(16, 0.005);
  const double lambda = 0.02;
  const std::vector<SourceLocation> truth{{deg(-30.0), 2.0}, {deg(15.0), 4.0}, {deg(50.0), 7.0}};

  const auto subspace_for = [&](const std::vector<double>& snrs, std::uint64_t seed) {
    std::vector<SourceSpec> sources;
    for (std::size_t i = 0; i < truth.size(); ++i) sources.push_back({truth[i], snrs[i]});
    const SnapshotMatrix snap = noiseless_los(g, lambda, sources, 64, seed);
    return signal_subspace(sample_covariance(snap.data), static_cast<int>(truth.size()));
  };

  SUBCASE("vanishes at the true configuration on noiseless data") {
    const Eigen::MatrixXcd basis = subspace_for({0.0, 0.0, 0.0}, 2);
    CHECK(esf_cost(truth, basis, g, lambda, PhaseModel::Fresnel) < 1e-8);
  }

  SUBCASE("coincident candidates are infeasible") {
    const Eigen::MatrixXcd basis = subspace_for({0.0, 0.0, 0.0}, 2);
    const std::vector<SourceLocation> duplicated{truth[0], truth[0], truth[2]};
    CHECK(std::isinf(esf_cost(duplicated, basis, g, lambda, PhaseModel::Fresnel)));
  }

  SUBCASE("matches the explicit Gram-inverse projector route") {
    Rng rng(13);
    const Eigen::MatrixXcd basis = subspace_for({0.0, 3.0, 6.0}, 3);
    for (int rep = 0; rep < 20; ++rep) {
      const std::vector<SourceLocation> x{{rng.uniform(-1.0, 1.0), rng.uniform(1.0, 10.0)},
                                          {rng.uniform(-1.0, 1.0), rng.uniform(1.0, 10.0)}};
      Eigen::MatrixXcd a(16, 2);
      a.col(0) = steering_vector(g, x[0], lambda, PhaseModel::Fresnel);
      a.col(1) = steering_vector(g, x[1], lambda, PhaseModel::Fresnel);
      const Eigen::MatrixXcd p = a * (a.adjoint() * a).inverse() * a.adjoint();
      const Eigen::MatrixXcd u2 = basis.leftCols(2);
      const double expected = (u2 - p * u2).squaredNorm();
      CHECK(esf_cost(x, u2, g, lambda, PhaseModel::Fresnel) ==
            doctest::Approx(expected).epsilon(1e-9));
    }
  }

  SUBCASE("bounded by the subspace dimension") {
    Rng rng(17);
    const Eigen::MatrixXcd basis = subspace_for({0.0, 0.0, 0.0}, 4);
    for (int rep = 0; rep < 200; ++rep) {
      const std::vector<SourceLocation> x{{rng.uniform(-1.0, 1.0), rng.uniform(1.0, 10.0)},
                                          {rng.uniform(-1.0, 1.0), rng.uniform(1.0, 10.0)},
                                          {rng.uniform(-1.0, 1.0), rng.uniform(1.0, 10.0)}};
      const double cost = esf_cost(x, basis, g, lambda, PhaseModel::Fresnel);
      if (std::isinf(cost)) continue;
      CHECK(cost >= 0.0);
      CHECK(cost <= 3.0 + 1e-9);
    }
  }

  SUBCASE("invariant to the source powers behind the subspace") {
    const Eigen::MatrixXcd equal = subspace_for({0.0, 0.0, 0.0}, 5);
    const Eigen::MatrixXcd skewed = subspace_for({0.0, 20.0, 40.0}, 5);
    Rng rng(19);
    for (int rep = 0; rep < 25; ++rep) {
      const std::vector<SourceLocation> x{{rng.uniform(-1.0, 1.0), rng.uniform(1.0, 10.0)},
                                          {rng.uniform(-1.0, 1.0), rng.uniform(1.0, 10.0)},
                                          {rng.uniform(-1.0, 1.0), rng.uniform(1.0, 10.0)}};
      const double a = esf_cost(x, equal, g, lambda, PhaseModel::Fresnel);
      const double b = esf_cost(x, skewed, g, lambda, PhaseModel::Fresnel);
      if (std::isinf(a) || std::isinf(b)) {
        CHECK(std::isinf(a) == std::isinf(b));
        continue;
      }
      CHECK(std::abs(a - b) < 1e-8);
    }
    CHECK(esf_cost(truth, skewed, g, lambda, PhaseModel::Fresnel) < 1e-8);
  }
}
