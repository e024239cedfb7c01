#pragma once

#include <cstdint>
#include <vector>

#include "nfloc/array.hpp"
#include "nfloc/rng.hpp"

namespace nfloc {

enum class ChannelKind { PureLos, Rician };
enum class NlosCorrelation { Iid, LocalScattering };

// Per-source channel statistics. PureLos means the channel equals the array
// response exactly; Rician mixes it with a Rayleigh-fading component whose
// spatial correlation is either identity (Iid) or a local-scattering model
// around the source azimuth.
struct ChannelModel {
  ChannelKind kind = ChannelKind::PureLos;
  double kappa = 0.0;
  NlosCorrelation correlation = NlosCorrelation::Iid;
  double angular_spread = 0.0;  // radians, LocalScattering only

  static ChannelModel pure_los() { return {}; }
  static ChannelModel rician(double kappa_factor);
  static ChannelModel rician_local_scattering(double kappa_factor, double spread_rad);
};

struct SourceSpec {
  SourceLocation location;
  double snr_db = 0.0;
};

// Full description of one synthetic data realization.
struct Scenario {
  ArrayGeometry geometry;
  double lambda;
  std::vector<SourceSpec> sources;
  int snapshots = 1;
  ChannelModel channel;
  std::uint64_t seed = 0;
  bool noiseless = false;  // sigma^2 = 0 switch for exactness tests
};

// M x T received data plus the metadata needed to localize on it. `truth`
// is carried for evaluation only; no estimator reads it.
struct SnapshotMatrix {
  Eigen::MatrixXcd data;
  ArrayGeometry geometry;
  double lambda;
  std::vector<SourceLocation> truth;
};

struct CorrelationMatrix {
  Eigen::MatrixXcd matrix;
  bool clipped = false;  // set when a negative eigenvalue had to be floored
};

// Spatial correlation of the scattered component for a source at `loc`:
// the array-response covariance under a Gaussian azimuth perturbation of
// the given spread, with the per-element phase linearized around the source
// azimuth. Hermitian PSD with unit diagonal (trace = M); collapses to the
// rank-one a a^H as the spread goes to zero and to the identity for wide
// spreads.
CorrelationMatrix local_scattering_correlation(const ArrayGeometry& geometry,
                                               const SourceLocation& loc, double lambda,
                                               double angular_spread);

// One channel vector draw. h = sqrt(kappa/(kappa+1)) a + sqrt(1/(kappa+1)) w
// with w ~ CN(0, R), trace(R) = M. Path loss is not applied here; the
// simulator folds it into the per-source SNR.
Eigen::VectorXcd rician_channel(const ArrayGeometry& geometry, const SourceLocation& loc,
                                double lambda, const ChannelModel& model, Rng& rng);

// Y = sum_k sqrt(beta_k) h_k s_k^T + N with unit-power Gaussian symbols,
// unit noise variance (unless scenario.noiseless) and beta_k = 10^(SNR/10).
SnapshotMatrix simulate_snapshots(const Scenario& scenario, Rng& rng);
SnapshotMatrix simulate_snapshots(const Scenario& scenario);

}  // namespace nfloc
