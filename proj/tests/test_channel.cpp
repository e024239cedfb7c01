#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nfloc/channel.hpp"
#include "nfloc/subspace.hpp"

using namespace nfloc;

namespace {
double deg(double d) { return d * std::numbers::pi / 180.0; }
}  // namespace

TEST_CASE("rician channel statistics") {
  const ArrayGeometry g = ArrayGeometry::ula(32, 0.005);
  const double lambda = 0.02;
  const SourceLocation loc{deg(20.0), 5.0};

  SUBCASE("pure line of sight is the array response exactly") {
    Rng rng(1);
    const Eigen::VectorXcd h = rician_channel(g, loc, lambda, ChannelModel::pure_los(), rng);
    CHECK((h - steering_vector(g, loc, lambda)).norm() == 0.0);
  }

  SUBCASE("kappa = 0 keeps unit average element power") {
    Rng rng(2);
    double total = 0.0;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
      total += rician_channel(g, loc, lambda, ChannelModel::rician(0.0), rng).squaredNorm();
    }
    CHECK(total / draws / 32.0 == doctest::Approx(1.0).epsilon(0.03));
  }

  SUBCASE("kappa = 10 splits power 10:1 between the components") {
    Rng rng(3);
    const Eigen::VectorXcd los = steering_vector(g, loc, lambda);
    const double los_weight = std::sqrt(10.0 / 11.0);
    double scattered = 0.0;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
      const Eigen::VectorXcd h = rician_channel(g, loc, lambda, ChannelModel::rician(10.0), rng);
      scattered += (h - los_weight * los).squaredNorm() / 32.0;
    }
    CHECK(scattered / draws == doctest::Approx(1.0 / 11.0).epsilon(0.05));
  }
}

TEST_CASE("local scattering correlation") {
  const ArrayGeometry g = ArrayGeometry::ula(16, 0.01);  // half wavelength at 15 GHz
  const double lambda = 0.02;
  const SourceLocation loc{deg(10.0), 3.0};

  SUBCASE("contract: Hermitian, PSD, unit diagonal") {
    for (double spread : {0.01, 0.1, 0.5, 1.5}) {
      const CorrelationMatrix corr = local_scattering_correlation(g, loc, lambda, spread);
      CHECK((corr.matrix - corr.matrix.adjoint()).norm() < 1e-12);
      const EigenDecomposition eig = eigendecompose_hermitian(corr.matrix);
      CHECK(eig.eigenvalues.minCoeff() > -1e-10);
      for (int i = 0; i < 16; ++i) {
        CHECK(std::abs(corr.matrix(i, i).real() - 1.0) < 1e-9);
        CHECK(std::abs(corr.matrix(i, i).imag()) < 1e-9);
      }
      CHECK(std::abs(corr.matrix.trace().real() - 16.0) < 1e-9);
    }
  }

  SUBCASE("tiny spread collapses onto the array response") {
    const CorrelationMatrix corr = local_scattering_correlation(g, loc, lambda, 1e-6);
    const Eigen::VectorXcd a = steering_vector(g, loc, lambda);
    CHECK((corr.matrix - a * a.adjoint()).norm() < 1e-6);
    const EigenDecomposition eig = eigendecompose_hermitian(corr.matrix);
    CHECK(eig.eigenvalues(0) == doctest::Approx(16.0).epsilon(1e-6));
  }

  SUBCASE("wide spread whitens the correlation") {
    const CorrelationMatrix corr = local_scattering_correlation(g, loc, lambda, 1.5);
    for (int i = 0; i < 16; ++i) {
      for (int j = 0; j < 16; ++j) {
        const double expected = i == j ? 1.0 : 0.0;
        CHECK(std::abs(corr.matrix(i, j) - std::complex<double>(expected, 0.0)) < 0.1);
      }
    }
  }

  SUBCASE("entries match quadrature of the correlation integral") {
    // Oracle: numerically integrate E[exp(j t dg)] against the Gaussian
    // angle density instead of using the characteristic function.
    const double spread = 0.2;
    const CorrelationMatrix corr = local_scattering_correlation(g, loc, lambda, spread);
    const Eigen::VectorXcd a = steering_vector(g, loc, lambda);
    const double k = 2.0 * std::numbers::pi / lambda;
    const double cos_phi = std::cos(loc.phi);

    for (int i : {0, 3, 9}) {
      for (int j : {1, 8, 15}) {
        const double dg = k * (i - j) * g.spacing() * cos_phi;
        std::complex<double> integral = 0.0;
        const int steps = 4001;
        const double half_width = 8.0 * spread;
        const double dt = 2.0 * half_width / (steps - 1);
        double mass = 0.0;
        for (int s = 0; s < steps; ++s) {
          const double t = -half_width + s * dt;
          const double density = std::exp(-0.5 * t * t / (spread * spread));
          integral += density * std::exp(std::complex<double>(0.0, t * dg));
          mass += density;
        }
        integral /= mass;
        const std::complex<double> expected = a(i) * std::conj(a(j)) * integral;
        CHECK(std::abs(corr.matrix(i, j) - expected) < 1e-4);
      }
    }
  }
}

TEST_CASE("snapshot simulation") {
  const double lambda = 0.02;

  SUBCASE("no sources leaves unit-variance noise") {
    Scenario scenario{ArrayGeometry::ula(64, 0.005), lambda, {}, 200,
                      ChannelModel::pure_los(), 7, false};
    const SnapshotMatrix snap = simulate_snapshots(scenario);
    const double mean_power = snap.data.squaredNorm() / (64.0 * 200.0);
    CHECK(mean_power == doctest::Approx(1.0).epsilon(0.05));
    CHECK(snap.truth.empty());
  }

  SUBCASE("noiseless single source is rank one with the right power") {
    const ArrayGeometry g = ArrayGeometry::ula(16, 0.005);
    Scenario scenario{g, lambda, {{SourceLocation{deg(30.0), 4.0}, 20.0}}, 50,
                      ChannelModel::pure_los(), 8, true};
    const SnapshotMatrix snap = simulate_snapshots(scenario);
    const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(snap.data);
    CHECK(svd.singularValues()(1) / svd.singularValues()(0) < 1e-12);
    // Y = sqrt(100) a s^T: per-antenna power beta * E|s|^2 = 100.
    const double per_entry = snap.data.squaredNorm() / (16.0 * 50.0);
    CHECK(per_entry == doctest::Approx(100.0).epsilon(0.4));
  }

  SUBCASE("power bookkeeping: two 0 dB sources plus noise gives 3 per entry") {
    Scenario scenario{ArrayGeometry::ula(32, 0.005),
                      lambda,
                      {{SourceLocation{deg(-20.0), 3.0}, 0.0}, {SourceLocation{deg(35.0), 6.0}, 0.0}},
                      10000,
                      ChannelModel::pure_los(),
                      9,
                      false};
    const SnapshotMatrix snap = simulate_snapshots(scenario);
    const double mean_power = snap.data.squaredNorm() / (32.0 * 10000.0);
    CHECK(mean_power == doctest::Approx(3.0).epsilon(0.05));
  }

  SUBCASE("reproducible bit for bit") {
    Scenario scenario{ArrayGeometry::ula(8, 0.005),
                      lambda,
                      {{SourceLocation{deg(10.0), 2.0}, 5.0}},
                      16,
                      ChannelModel::rician(10.0),
                      123,
                      false};
    const SnapshotMatrix a = simulate_snapshots(scenario);
    const SnapshotMatrix b = simulate_snapshots(scenario);
    CHECK(a.data == b.data);
  }

  SUBCASE("noiseless well-separated sources give numerical rank K") {
    Scenario scenario{ArrayGeometry::ula(32, 0.005),
                      lambda,
                      {{SourceLocation{deg(-40.0), 2.0}, 0.0},
                       {SourceLocation{deg(5.0), 4.0}, 0.0},
                       {SourceLocation{deg(45.0), 7.0}, 0.0}},
                      64,
                      ChannelModel::pure_los(),
                      10,
                      true};
    const SnapshotMatrix snap = simulate_snapshots(scenario);
    const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(snap.data);
    CHECK(svd.singularValues()(3) / svd.singularValues()(0) < 1e-10);
    CHECK(svd.singularValues()(2) / svd.singularValues()(0) > 1e-6);
  }

  SUBCASE("scenario validation") {
    CHECK_THROWS_AS(simulate_snapshots(Scenario{ArrayGeometry::ula(2, 0.01),
                                                lambda,
                                                {{SourceLocation{0.1, 1.0}, 0.0},
                                                 {SourceLocation{0.2, 2.0}, 0.0}},
                                                4,
                                                ChannelModel::pure_los(),
                                                0,
                                                false}),
                    std::invalid_argument);
    CHECK_THROWS_AS(simulate_snapshots(Scenario{ArrayGeometry::ula(8, 0.01),
                                                lambda,
                                                {{SourceLocation{0.1, 1.0}, 0.0},
                                                 {SourceLocation{0.1, 1.0}, 3.0}},
                                                4,
                                                ChannelModel::pure_los(),
                                                0,
                                                false}),
                    std::invalid_argument);
  }
}
