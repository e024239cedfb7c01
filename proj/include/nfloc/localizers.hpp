#pragma once

#include <cstddef>
#include <string>

#include "nfloc/channel.hpp"
#include "nfloc/de.hpp"
#include "nfloc/objectives.hpp"

namespace nfloc {

// Box of admissible source parameters. The default for a geometry follows
// the usual near-field benchmark region: azimuth +-60 deg, elevation
// +-30 deg (planar arrays), range from twice the aperture to half the
// Fraunhofer distance.
struct SearchDomain {
  std::pair<double, double> phi;
  std::optional<std::pair<double, double>> psi;
  std::pair<double, double> range;

  static SearchDomain for_geometry(const ArrayGeometry& geometry, double lambda);

  int dims() const { return psi ? 3 : 2; }
  bool contains(const SourceLocation& loc) const;
  // DE bounds in [phi, (psi), range] order.
  std::vector<std::pair<double, double>> bounds() const;
};

// Grid resolution for the MUSIC search; n_psi = 0 selects the 2D grid.
struct GridSpec {
  int n_phi = 200;
  int n_psi = 0;
  int n_range = 1000;
};

// Concrete scan grid with cell-center nodes, flattened in
// ((phi * n_psi + psi) * n_range + range) order.
class Grid {
 public:
  static Grid make(const SearchDomain& domain, const GridSpec& spec);

  std::size_t node_count() const { return phi_.size() * std::max<std::size_t>(psi_.size(), 1) * range_.size(); }
  bool has_elevation() const { return !psi_.empty(); }
  const std::vector<double>& phi() const { return phi_; }
  const std::vector<double>& psi() const { return psi_; }
  const std::vector<double>& range() const { return range_; }
  SourceLocation node(std::size_t index) const;
  // Cell sizes per axis, used for the half-cell error bound.
  double phi_step() const { return phi_step_; }
  double psi_step() const { return psi_step_; }
  double range_step() const { return range_step_; }

 private:
  std::vector<double> phi_, psi_, range_;
  double phi_step_ = 0.0, psi_step_ = 0.0, range_step_ = 0.0;
};

struct LocalizationResult {
  std::string method;
  std::vector<SourceLocation> estimates;
  std::vector<double> per_source_cost;
  std::vector<DERunResult> traces;
  std::vector<double> residual_energy;  // sequential localizer: ||Y||_F^2 after each deflation
  double runtime_s = 0.0;
  bool aborted = false;
  std::string abort_reason;
  bool shortfall = false;
};

// Reference defaults: Np = 50, Gmax = 300, F = 0.5, Cr = 0.8 for the
// sequential search; Np = 40K, Gmax = 500 for the joint search.
DEConfig nemo_default_config(std::uint64_t seed);
DEConfig neef_default_config(int k, std::uint64_t seed);

// Sequential multimodal localization: K DE runs over the penalized
// residual-least-squares objective, with projection deflation after each
// accepted detection. A detection must shave at least 0.1% off the residual
// energy; otherwise the remaining searches are abandoned and the result is
// marked aborted.
LocalizationResult nemo_de(const SnapshotMatrix& snapshots, int k, const SearchDomain& domain,
                           const DEConfig& de_config, const PenaltyConfig& penalty_cfg);

// Joint localization: one DE run over the stacked K-source vector against
// the eigen-subspace fitting objective, computed from the sample covariance
// once up front.
LocalizationResult neef_de(const SnapshotMatrix& snapshots, int k, const SearchDomain& domain,
                           const DEConfig& de_config);

// MUSIC pseudospectrum 1 / (||U_n^H a(theta)||^2 + eps) over every grid
// node, eps = 1e-12 * M.
std::vector<double> music_spectrum(const Eigen::MatrixXcd& noise_basis, const Grid& grid,
                                   const ArrayGeometry& geometry, double lambda, PhaseModel model);

// Repeated argmax peak picking with a normalized-coordinate exclusion ball
// around each accepted peak. Returns node indices; sets `shortfall` if the
// spectrum is exhausted before k peaks are found.
std::vector<std::size_t> pick_peaks(const std::vector<double>& spectrum, const Grid& grid, int k,
                                    double exclusion_radius, bool* shortfall = nullptr);

// Grid-search MUSIC baseline (2D over angle-range, 3D for planar arrays).
LocalizationResult music_localize(const SnapshotMatrix& snapshots, int k,
                                  const SearchDomain& domain, const GridSpec& grid_spec);

}  // namespace nfloc
