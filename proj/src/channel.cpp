#include "nfloc/channel.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nfloc {

namespace {

// d(phase_m)/d(phi) in radians per radian, used to linearize the response
// around the source azimuth. phase_m = (2 pi / lambda) (d_1 - d_m).
Eigen::VectorXd azimuth_phase_slope(const ArrayGeometry& geometry, const SourceLocation& loc,
                                    double lambda, PhaseModel model) {
  const int m = geometry.element_count();
  const double wavenumber = 2.0 * std::numbers::pi / lambda;
  Eigen::VectorXd slope(m);
  if (model == PhaseModel::Fresnel) {
    const double cos_phi = std::cos(loc.phi);
    for (int i = 0; i < m; ++i) {
      slope(i) = wavenumber * i * geometry.spacing() * cos_phi;
    }
    return slope;
  }
  const Eigen::Vector3d p = source_position(loc);
  const double ce = loc.has_elevation() ? std::cos(*loc.psi) : 1.0;
  const Eigen::Vector3d dp_dphi(loc.range * ce * std::cos(loc.phi),
                                -loc.range * ce * std::sin(loc.phi), 0.0);
  // d_1 = |p| is independent of phi, so only the element terms contribute.
  for (int i = 0; i < m; ++i) {
    const Eigen::Vector3d diff = p - geometry.element_positions().col(i);
    slope(i) = -wavenumber * diff.dot(dp_dphi) / diff.norm();
  }
  return slope;
}

}  // namespace

ChannelModel ChannelModel::rician(double kappa_factor) {
  if (kappa_factor < 0.0) throw std::invalid_argument("kappa must be nonnegative");
  ChannelModel model;
  model.kind = ChannelKind::Rician;
  model.kappa = kappa_factor;
  return model;
}

ChannelModel ChannelModel::rician_local_scattering(double kappa_factor, double spread_rad) {
  if (!(spread_rad > 0.0)) throw std::invalid_argument("angular spread must be positive");
  ChannelModel model = rician(kappa_factor);
  model.correlation = NlosCorrelation::LocalScattering;
  model.angular_spread = spread_rad;
  return model;
}

CorrelationMatrix local_scattering_correlation(const ArrayGeometry& geometry,
                                               const SourceLocation& loc, double lambda,
                                               double angular_spread) {
  if (!(angular_spread > 0.0)) throw std::invalid_argument("angular spread must be positive");
  const PhaseModel model = default_phase_model(geometry);
  const Eigen::VectorXcd a = steering_vector(geometry, loc, lambda, model);
  const Eigen::VectorXd g = azimuth_phase_slope(geometry, loc, lambda, model);
  const int m = geometry.element_count();
  const double var = angular_spread * angular_spread;

  // R_mn = a_m conj(a_n) E[exp(j t (g_m - g_n))], t ~ N(0, spread^2); the
  // Gaussian characteristic function gives exp(-var (g_m - g_n)^2 / 2).
  CorrelationMatrix out;
  out.matrix.resize(m, m);
  for (int row = 0; row < m; ++row) {
    out.matrix(row, row) = 1.0;
    for (int col = row + 1; col < m; ++col) {
      const double dg = g(row) - g(col);
      const std::complex<double> value = a(row) * std::conj(a(col)) * std::exp(-0.5 * var * dg * dg);
      out.matrix(row, col) = value;
      out.matrix(col, row) = std::conj(value);
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(out.matrix);
  if (solver.eigenvalues().minCoeff() < -1e-10 * std::max(solver.eigenvalues().maxCoeff(), 1.0)) {
    out.clipped = true;
    const Eigen::VectorXd floored = solver.eigenvalues().cwiseMax(0.0);
    out.matrix = solver.eigenvectors() * floored.asDiagonal() * solver.eigenvectors().adjoint();
  }
  return out;
}

Eigen::VectorXcd rician_channel(const ArrayGeometry& geometry, const SourceLocation& loc,
                                double lambda, const ChannelModel& model, Rng& rng) {
  const Eigen::VectorXcd los = steering_vector(geometry, loc, lambda);
  if (model.kind == ChannelKind::PureLos) return los;

  const int m = geometry.element_count();
  Eigen::VectorXcd white(m);
  for (int i = 0; i < m; ++i) white(i) = rng.complex_normal();

  Eigen::VectorXcd nlos;
  if (model.correlation == NlosCorrelation::Iid) {
    nlos = std::move(white);
  } else {
    const CorrelationMatrix corr =
        local_scattering_correlation(geometry, loc, lambda, model.angular_spread);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(corr.matrix);
    const Eigen::VectorXd sqrt_eig = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    nlos = solver.eigenvectors() * (sqrt_eig.asDiagonal() * (solver.eigenvectors().adjoint() * white));
  }

  const double los_weight = std::sqrt(model.kappa / (model.kappa + 1.0));
  const double nlos_weight = std::sqrt(1.0 / (model.kappa + 1.0));
  return los_weight * los + nlos_weight * nlos;
}

SnapshotMatrix simulate_snapshots(const Scenario& scenario, Rng& rng) {
  const int m = scenario.geometry.element_count();
  const auto k = static_cast<int>(scenario.sources.size());
  if (k >= m) throw std::invalid_argument("need fewer sources than antennas");
  if (scenario.snapshots < 1) throw std::invalid_argument("need at least one snapshot");
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      const auto& a = scenario.sources[i].location;
      const auto& b = scenario.sources[j].location;
      if (a.phi == b.phi && a.range == b.range && a.psi == b.psi) {
        throw std::invalid_argument("source locations must be distinct");
      }
    }
  }

  const int t = scenario.snapshots;
  SnapshotMatrix snap{Eigen::MatrixXcd::Zero(m, t), scenario.geometry, scenario.lambda, {}};
  snap.truth.reserve(k);

  // Draw order is fixed (per source: channel then symbols, then noise) so a
  // given seed always produces the same realization.
  for (const SourceSpec& source : scenario.sources) {
    const Eigen::VectorXcd h =
        rician_channel(scenario.geometry, source.location, scenario.lambda, scenario.channel, rng);
    Eigen::VectorXcd symbols(t);
    for (int j = 0; j < t; ++j) symbols(j) = rng.complex_normal();
    const double amplitude = std::sqrt(std::pow(10.0, source.snr_db / 10.0));
    snap.data.noalias() += (amplitude * h) * symbols.transpose();
    snap.truth.push_back(source.location);
  }
  if (!scenario.noiseless) {
    for (int j = 0; j < t; ++j) {
      for (int i = 0; i < m; ++i) snap.data(i, j) += rng.complex_normal();
    }
  }
  return snap;
}

SnapshotMatrix simulate_snapshots(const Scenario& scenario) {
  Rng rng(scenario.seed);
  return simulate_snapshots(scenario, rng);
}

}  // namespace nfloc
