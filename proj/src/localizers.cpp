#include "nfloc/localizers.hpp"

#include <cassert>
#include <chrono>
#include <cmath>
#include <numbers>

#include "nfloc/subspace.hpp"

namespace nfloc {

namespace {

constexpr std::uint64_t kSequentialRunTag = 0x72756E73;  // per-detection DE substreams

// A detection must reduce the residual energy by at least this fraction.
constexpr double kMinResidualReduction = 1e-3;
// Below this fraction of the original energy the residual is considered
// exhausted and further searches are pointless.
constexpr double kResidualFloor = 1e-12;

SourceLocation decode_location(const Eigen::VectorXd& vec, int offset, bool with_elevation) {
  if (with_elevation) return {vec(offset), vec(offset + 1), vec(offset + 2)};
  return {vec(offset), vec(offset + 1)};
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace

SearchDomain SearchDomain::for_geometry(const ArrayGeometry& geometry, double lambda) {
  const double ap = aperture(geometry);
  SearchDomain domain;
  domain.phi = {-std::numbers::pi / 3.0, std::numbers::pi / 3.0};
  if (!geometry.is_ula()) domain.psi = {{-std::numbers::pi / 6.0, std::numbers::pi / 6.0}};
  domain.range = {2.0 * ap, fraunhofer_distance(geometry, lambda) / 2.0};
  return domain;
}

bool SearchDomain::contains(const SourceLocation& loc) const {
  if (loc.phi < phi.first || loc.phi > phi.second) return false;
  if (loc.range < range.first || loc.range > range.second) return false;
  if (psi.has_value() != loc.has_elevation()) return false;
  if (psi && (*loc.psi < psi->first || *loc.psi > psi->second)) return false;
  return true;
}

std::vector<std::pair<double, double>> SearchDomain::bounds() const {
  std::vector<std::pair<double, double>> box{phi};
  if (psi) box.push_back(*psi);
  box.push_back(range);
  return box;
}

Grid Grid::make(const SearchDomain& domain, const GridSpec& spec) {
  if (spec.n_phi < 2 || spec.n_range < 2) throw std::invalid_argument("grid needs >= 2 nodes per axis");
  if (domain.psi && spec.n_psi < 2) throw std::invalid_argument("planar domain needs an elevation grid");
  const auto fill = [](std::vector<double>& axis, double lo, double hi, int n, double& step) {
    step = (hi - lo) / n;
    axis.resize(n);
    for (int i = 0; i < n; ++i) axis[i] = lo + (i + 0.5) * step;
  };
  Grid grid;
  fill(grid.phi_, domain.phi.first, domain.phi.second, spec.n_phi, grid.phi_step_);
  if (domain.psi) fill(grid.psi_, domain.psi->first, domain.psi->second, spec.n_psi, grid.psi_step_);
  fill(grid.range_, domain.range.first, domain.range.second, spec.n_range, grid.range_step_);
  return grid;
}

SourceLocation Grid::node(std::size_t index) const {
  const std::size_t nr = range_.size();
  if (psi_.empty()) {
    return {phi_[index / nr], range_[index % nr]};
  }
  const std::size_t np = psi_.size();
  return {phi_[index / (np * nr)], psi_[(index / nr) % np], range_[index % nr]};
}

DEConfig nemo_default_config(std::uint64_t seed) {
  DEConfig config;
  config.population_size = 50;
  config.max_generations = 300;
  config.weight = 0.5;
  config.crossover = 0.8;
  config.seed = seed;
  return config;
}

DEConfig neef_default_config(int k, std::uint64_t seed) {
  DEConfig config;
  config.population_size = 40 * k;
  config.max_generations = 500;
  config.weight = 0.5;
  config.crossover = 0.8;
  config.seed = seed;
  return config;
}

LocalizationResult nemo_de(const SnapshotMatrix& snapshots, int k, const SearchDomain& domain,
                           const DEConfig& de_config, const PenaltyConfig& penalty_cfg) {
  if (k < 1) throw std::invalid_argument("need at least one source");
  const Stopwatch clock;
  const ArrayGeometry& geometry = snapshots.geometry;
  const PhaseModel model = default_phase_model(geometry);
  const bool planar = domain.psi.has_value();
  const double m = geometry.element_count();

  LocalizationResult result;
  result.method = "nemo";

  Eigen::MatrixXcd residual = snapshots.data;
  const double original_energy = residual.squaredNorm();

  for (int detection = 0; detection < k; ++detection) {
    const double energy = residual.squaredNorm();
    if (energy <= kResidualFloor * original_energy) {
      result.aborted = true;
      result.abort_reason = "residual energy exhausted";
      break;
    }

    DEConfig config = de_config;
    config.bounds = domain.bounds();
    config.seed = substream(de_config.seed, kSequentialRunTag,
                            static_cast<std::uint64_t>(detection));

    const Objective objective = [&](const Eigen::VectorXd& vec) {
      const SourceLocation theta = decode_location(vec, 0, planar);
      const Eigen::VectorXcd a = steering_vector(geometry, theta, snapshots.lambda, model);
      const double data_cost =
          std::max(energy - (a.adjoint() * residual).squaredNorm() / m, 0.0);
      return data_cost + penalty(theta, result.estimates, penalty_cfg);
    };

    DERunResult run = run_de(objective, config);
    const SourceLocation estimate = decode_location(run.best_vector, 0, planar);
    const double data_cost =
        rls_cost(residual, estimate, geometry, snapshots.lambda, model);

    if (data_cost > (1.0 - kMinResidualReduction) * energy) {
      result.aborted = true;
      result.abort_reason = "detection " + std::to_string(detection + 1) +
                            " reduced residual energy by less than 0.1%";
      break;
    }

    const Eigen::VectorXcd a = steering_vector(geometry, estimate, snapshots.lambda, model);
    residual = residual_project(residual, a);
    // Deflation identity: the new residual energy equals the accepted RLS cost.
    assert(std::abs(residual.squaredNorm() - data_cost) <= 1e-6 * energy + 1e-12);

    result.estimates.push_back(estimate);
    result.per_source_cost.push_back(data_cost);
    result.residual_energy.push_back(residual.squaredNorm());
    result.traces.push_back(std::move(run));
  }

  result.runtime_s = clock.seconds();
  return result;
}

LocalizationResult neef_de(const SnapshotMatrix& snapshots, int k, const SearchDomain& domain,
                           const DEConfig& de_config) {
  const int m = snapshots.geometry.element_count();
  if (k < 1 || k >= m) throw std::invalid_argument("need 1 <= k < M");
  const Stopwatch clock;
  const ArrayGeometry& geometry = snapshots.geometry;
  const PhaseModel model = default_phase_model(geometry);
  const bool planar = domain.psi.has_value();
  const int block = domain.dims();

  const Eigen::MatrixXcd covariance = sample_covariance(snapshots.data);
  const Eigen::MatrixXcd signal_basis = signal_subspace(covariance, k);

  DEConfig config = de_config;
  config.bounds.clear();
  const std::vector<std::pair<double, double>> block_bounds = domain.bounds();
  for (int i = 0; i < k; ++i) {
    config.bounds.insert(config.bounds.end(), block_bounds.begin(), block_bounds.end());
  }

  std::vector<SourceLocation> candidates;
  candidates.reserve(k);
  const Objective objective = [&](const Eigen::VectorXd& vec) {
    candidates.clear();
    for (int i = 0; i < k; ++i) candidates.push_back(decode_location(vec, i * block, planar));
    return esf_cost(candidates, signal_basis, geometry, snapshots.lambda, model);
  };

  DERunResult run = run_de(objective, config);

  LocalizationResult result;
  result.method = "neef";
  for (int i = 0; i < k; ++i) {
    result.estimates.push_back(decode_location(run.best_vector, i * block, planar));
  }
  result.per_source_cost.assign(1, run.best_cost);
  result.traces.push_back(std::move(run));
  result.runtime_s = clock.seconds();
  return result;
}

std::vector<double> music_spectrum(const Eigen::MatrixXcd& noise_basis, const Grid& grid,
                                   const ArrayGeometry& geometry, double lambda,
                                   PhaseModel model) {
  const int m = geometry.element_count();
  const double eps = 1e-12 * m;
  const std::size_t nodes = grid.node_count();
  std::vector<double> spectrum(nodes);

  // Nodes are scanned in batches so the noise-subspace products run as
  // matrix-matrix operations instead of per-node matrix-vector ones.
  constexpr std::size_t kBatch = 128;
  Eigen::MatrixXcd responses(m, kBatch);
  Eigen::MatrixXcd projected(noise_basis.cols(), kBatch);
  for (std::size_t start = 0; start < nodes; start += kBatch) {
    const auto count = static_cast<Eigen::Index>(std::min(kBatch, nodes - start));
    for (Eigen::Index j = 0; j < count; ++j) {
      responses.col(j) = steering_vector(geometry, grid.node(start + j), lambda, model);
    }
    projected.leftCols(count).noalias() = noise_basis.adjoint() * responses.leftCols(count);
    for (Eigen::Index j = 0; j < count; ++j) {
      spectrum[start + j] = 1.0 / (projected.col(j).squaredNorm() + eps);
    }
  }
  return spectrum;
}

namespace {

// Repeated argmax with an arbitrary per-peak masking predicate.
template <typename MaskPredicate>
std::vector<std::size_t> pick_peaks_masked(const std::vector<double>& spectrum, const Grid& grid,
                                           int k, bool* shortfall, MaskPredicate&& masks) {
  if (k < 1) throw std::invalid_argument("need at least one peak");
  std::vector<char> masked(spectrum.size(), 0);
  std::vector<std::size_t> peaks;
  if (shortfall != nullptr) *shortfall = false;

  for (int found = 0; found < k; ++found) {
    std::size_t best = spectrum.size();
    double best_value = -1.0;
    for (std::size_t i = 0; i < spectrum.size(); ++i) {
      if (!masked[i] && spectrum[i] > best_value) {
        best_value = spectrum[i];
        best = i;
      }
    }
    if (best == spectrum.size()) {
      if (shortfall != nullptr) *shortfall = true;
      break;
    }
    peaks.push_back(best);
    const SourceLocation peak = grid.node(best);
    for (std::size_t i = 0; i < spectrum.size(); ++i) {
      if (!masked[i] && masks(peak, grid.node(i))) masked[i] = 1;
    }
  }
  return peaks;
}

}  // namespace

std::vector<std::size_t> pick_peaks(const std::vector<double>& spectrum, const Grid& grid, int k,
                                    double exclusion_radius, bool* shortfall) {
  const PenaltyConfig norms;  // shared normalization (radians and meters over 1)
  return pick_peaks_masked(spectrum, grid, k, shortfall,
                           [&](const SourceLocation& peak, const SourceLocation& node) {
                             return normalized_distance(node, peak, norms) <= exclusion_radius;
                           });
}

LocalizationResult music_localize(const SnapshotMatrix& snapshots, int k,
                                  const SearchDomain& domain, const GridSpec& grid_spec) {
  const int m = snapshots.geometry.element_count();
  if (k < 1 || k >= m) throw std::invalid_argument("need 1 <= k < M");
  const Stopwatch clock;

  const Eigen::MatrixXcd covariance = sample_covariance(snapshots.data);
  const Eigen::MatrixXcd noise_basis = noise_subspace(covariance, k);
  const Grid grid = Grid::make(domain, grid_spec);
  const std::vector<double> spectrum =
      music_spectrum(noise_basis, grid, snapshots.geometry, snapshots.lambda,
                     default_phase_model(snapshots.geometry));

  LocalizationResult result;
  result.method = "music";
  bool shortfall = false;

  // A detected source's pseudospectrum ridge extends over the local range
  // resolution (about 2 r^2 / d_FA), which dwarfs the flat separation
  // radius; excluding only a ball around the peak re-picks the same ridge
  // a few range cells away and starves genuinely distinct sources. The
  // exclusion region is therefore the separation ball in angle crossed
  // with the peak's range-ambiguity band.
  const PenaltyConfig norms;
  const double radius = norms.delta_min;
  const double far_boundary = fraunhofer_distance(snapshots.geometry, snapshots.lambda);
  const auto angular_distance = [](const SourceLocation& a, const SourceLocation& b) {
    const double dphi = a.phi - b.phi;
    const double dpsi = (a.psi && b.psi) ? *a.psi - *b.psi : 0.0;
    return std::hypot(dphi, dpsi);
  };
  for (const std::size_t index : pick_peaks_masked(
           spectrum, grid, k, &shortfall,
           [&](const SourceLocation& peak, const SourceLocation& node) {
             if (normalized_distance(node, peak, norms) <= radius) return true;
             const double widest = std::max(peak.range, node.range);
             const double ridge = 2.0 * widest * widest / far_boundary;
             return angular_distance(node, peak) <= radius &&
                    std::abs(node.range - peak.range) <= ridge;
           })) {
    result.estimates.push_back(grid.node(index));
    result.per_source_cost.push_back(spectrum[index]);
  }
  result.shortfall = shortfall;
  result.runtime_s = clock.seconds();
  return result;
}

}  // namespace nfloc
