#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "nfloc/localizers.hpp"

namespace nfloc {

// Angle-range parameters to Cartesian meters under the array axis
// convention (z = 0 for linear arrays).
Eigen::Vector3d to_cartesian(const SourceLocation& loc, const ArrayGeometry& geometry);

struct MatchResult {
  std::vector<int> assignment;      // truth index per estimate
  std::vector<double> pair_errors;  // Euclidean error per estimate, meters
  double rmse = 0.0;                // NaN when there is nothing to match
  int misses = 0;                   // truths left without an estimate
};

// Assigns estimates to truths by exhaustive minimization of the summed
// squared Cartesian error (injective assignment, sizes up to 8), then
// reports the RMSE over the matched pairs. Unmatched truths are counted as
// misses and excluded from the RMSE.
MatchResult match_and_rmse(std::span<const SourceLocation> truth,
                           std::span<const SourceLocation> estimates,
                           const ArrayGeometry& geometry);

enum class SweepAxis { Snr, SourceCount, SnrDeviation, GridSize };

// Monte-Carlo experiment description: a scenario template with randomized
// sources, one swept parameter, and the set of methods to run on identical
// data per trial.
struct BenchmarkConfig {
  ArrayGeometry geometry;
  double lambda = 0.02;
  int snapshots = 200;
  ChannelModel channel = ChannelModel::rician(10.0);
  SearchDomain domain;  // search box and source-draw region
  int k = 3;
  double snr_db = 20.0;
  double snr_deviation_db = 0.0;  // unbalanced SNRs: {base, base - d, base + d, ...}
  SweepAxis axis = SweepAxis::Snr;
  std::vector<double> values;
  int trials = 1;
  std::vector<std::string> methods;  // "nemo", "neef", "music"
  GridSpec grid;                     // music resolution (unless sweeping it)
  std::uint64_t seed = 0;
  bool noiseless = false;
  // Pins the source locations instead of drawing them; SNRs still follow
  // the sweep rules. Incompatible with the source-count sweep.
  std::vector<SourceLocation> fixed_sources;
};

struct TrialRecord {
  double sweep_value = 0.0;
  int trial = 0;
  std::string method;
  int k = 0;
  std::vector<SourceLocation> truth;
  std::vector<SourceLocation> estimates;
  MatchResult match;
  double runtime_s = 0.0;
  bool aborted = false;
  bool shortfall = false;
};

// Draws the trial's sources from the configured region. Exposed so tests
// and the acceptance suite can reproduce benchmark scenarios exactly.
std::vector<SourceSpec> draw_sources(const BenchmarkConfig& config, int k, double snr_db,
                                     double snr_deviation_db, Rng& rng);

// Seed for (sweep point, trial), independent of the method list.
std::uint64_t trial_seed(std::uint64_t master_seed, int point_index, int trial_index);

// Runs every (sweep value x trial x method) cell in deterministic order.
// Each method within a trial sees the same snapshot matrix.
std::vector<TrialRecord> run_benchmark(const BenchmarkConfig& config);

void write_results_csv(const std::filesystem::path& path, std::span<const TrialRecord> records);

// Per (method, sweep value) aggregation of the per-trial RMSE and runtime;
// returns a JSON document (also used by the standalone report command).
std::string summarize_records(std::span<const TrialRecord> records);

// Rebuilds trial-level summaries from a results CSV written by
// write_results_csv.
std::string summarize_csv_files(const std::vector<std::filesystem::path>& csv_paths);

double median(std::vector<double> values);

}  // namespace nfloc
