#include "nfloc/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace nfloc {

namespace {

constexpr std::uint64_t kSourceTag = 0x73726373;  // source placement stream
constexpr double kRadPerDeg = std::numbers::pi / 180.0;

std::string format_double(double value) {
  char buffer[32];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

}  // namespace

Eigen::Vector3d to_cartesian(const SourceLocation& loc, const ArrayGeometry& geometry) {
  if (loc.has_elevation() != !geometry.is_ula()) {
    throw std::invalid_argument("location elevation does not match the array kind");
  }
  return source_position(loc);
}

MatchResult match_and_rmse(std::span<const SourceLocation> truth,
                           std::span<const SourceLocation> estimates,
                           const ArrayGeometry& geometry) {
  const int n_truth = static_cast<int>(truth.size());
  const int n_est = static_cast<int>(estimates.size());
  if (n_est > n_truth) throw std::invalid_argument("more estimates than true sources");
  if (n_truth > 8) throw std::invalid_argument("exhaustive matching is limited to 8 sources");

  MatchResult result;
  result.misses = n_truth - n_est;
  if (n_est == 0) {
    result.rmse = std::numeric_limits<double>::quiet_NaN();
    return result;
  }

  std::vector<Eigen::Vector3d> truth_xyz, est_xyz;
  for (const auto& loc : truth) truth_xyz.push_back(to_cartesian(loc, geometry));
  for (const auto& loc : estimates) est_xyz.push_back(to_cartesian(loc, geometry));

  // Brute force over all injective assignments estimate -> truth.
  std::vector<int> order(n_truth);
  std::iota(order.begin(), order.end(), 0);
  std::vector<int> best_assignment;
  double best_sum = std::numeric_limits<double>::infinity();
  do {
    double sum = 0.0;
    for (int e = 0; e < n_est; ++e) sum += (truth_xyz[order[e]] - est_xyz[e]).squaredNorm();
    if (sum < best_sum) {
      best_sum = sum;
      best_assignment.assign(order.begin(), order.begin() + n_est);
    }
  } while (std::next_permutation(order.begin(), order.end()));

  result.assignment = best_assignment;
  result.pair_errors.resize(n_est);
  for (int e = 0; e < n_est; ++e) {
    result.pair_errors[e] = (truth_xyz[best_assignment[e]] - est_xyz[e]).norm();
  }
  result.rmse = std::sqrt(best_sum / n_est);
  return result;
}

std::vector<SourceSpec> draw_sources(const BenchmarkConfig& config, int k, double snr_db,
                                     double snr_deviation_db, Rng& rng) {
  std::vector<SourceSpec> sources;
  sources.reserve(k);
  for (int i = 0; i < k; ++i) {
    double snr = snr_db;
    if (snr_deviation_db != 0.0 && i > 0) {
      snr += (i % 2 == 1) ? -snr_deviation_db : snr_deviation_db;
    }
    if (!config.fixed_sources.empty()) {
      sources.push_back({config.fixed_sources.at(i), snr});
      continue;
    }
    const double phi = rng.uniform(config.domain.phi.first, config.domain.phi.second);
    std::optional<double> psi;
    if (config.domain.psi) psi = rng.uniform(config.domain.psi->first, config.domain.psi->second);
    const double range = rng.uniform(config.domain.range.first, config.domain.range.second);
    if (psi) {
      sources.push_back({SourceLocation(phi, *psi, range), snr});
    } else {
      sources.push_back({SourceLocation(phi, range), snr});
    }
  }
  return sources;
}

std::uint64_t trial_seed(std::uint64_t master_seed, int point_index, int trial_index) {
  return substream(master_seed, static_cast<std::uint64_t>(point_index),
                   static_cast<std::uint64_t>(trial_index));
}

std::vector<TrialRecord> run_benchmark(const BenchmarkConfig& config) {
  if (config.trials < 1) throw std::invalid_argument("need at least one trial");
  if (config.values.empty()) throw std::invalid_argument("empty sweep");
  if (!config.fixed_sources.empty() && config.axis == SweepAxis::SourceCount) {
    throw std::invalid_argument("fixed sources cannot be combined with a source-count sweep");
  }

  std::vector<TrialRecord> records;
  for (int point = 0; point < static_cast<int>(config.values.size()); ++point) {
    const double value = config.values[point];

    int k = config.fixed_sources.empty() ? config.k
                                         : static_cast<int>(config.fixed_sources.size());
    double snr = config.snr_db;
    double deviation = config.snr_deviation_db;
    GridSpec grid = config.grid;
    switch (config.axis) {
      case SweepAxis::Snr: snr = value; break;
      case SweepAxis::SourceCount: k = static_cast<int>(value); break;
      case SweepAxis::SnrDeviation: deviation = value; break;
      case SweepAxis::GridSize: {
        const int g = static_cast<int>(value);
        grid = config.domain.psi ? GridSpec{g, g, 2 * g} : GridSpec{g, 0, 5 * g};
        break;
      }
    }

    for (int trial = 0; trial < config.trials; ++trial) {
      const std::uint64_t seed = trial_seed(config.seed, point, trial);
      Rng source_rng(substream(seed, kSourceTag));

      Scenario scenario{config.geometry, config.lambda,
                        draw_sources(config, k, snr, deviation, source_rng),
                        config.snapshots, config.channel, seed, config.noiseless};
      const SnapshotMatrix snapshots = simulate_snapshots(scenario);

      for (const std::string& method : config.methods) {
        LocalizationResult loc;
        if (method == "nemo") {
          loc = nemo_de(snapshots, k, config.domain, nemo_default_config(seed), PenaltyConfig{});
        } else if (method == "neef") {
          loc = neef_de(snapshots, k, config.domain, neef_default_config(k, seed));
        } else if (method == "music") {
          loc = music_localize(snapshots, k, config.domain, grid);
        } else {
          throw std::invalid_argument("unknown method '" + method + "'");
        }

        TrialRecord record;
        record.sweep_value = value;
        record.trial = trial;
        record.method = method;
        record.k = k;
        record.truth = snapshots.truth;
        record.estimates = loc.estimates;
        record.match = match_and_rmse(record.truth, record.estimates, config.geometry);
        record.runtime_s = loc.runtime_s;
        record.aborted = loc.aborted;
        record.shortfall = loc.shortfall;
        records.push_back(std::move(record));
      }
    }
  }
  return records;
}

void write_results_csv(const std::filesystem::path& path, std::span<const TrialRecord> records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "sweep,trial,method,k,src,phi_true_deg,psi_true_deg,r_true_m,"
         "phi_est_deg,psi_est_deg,r_est_m,err_m,rmse_m,runtime_s,flags\n";

  for (const TrialRecord& record : records) {
    // One row per true source; estimate columns stay empty on a miss.
    for (int src = 0; src < static_cast<int>(record.truth.size()); ++src) {
      const SourceLocation& truth = record.truth[src];
      int est_index = -1;
      for (int e = 0; e < static_cast<int>(record.match.assignment.size()); ++e) {
        if (record.match.assignment[e] == src) {
          est_index = e;
          break;
        }
      }

      out << format_double(record.sweep_value) << ',' << record.trial << ',' << record.method
          << ',' << record.k << ',' << (src + 1) << ','
          << format_double(truth.phi / kRadPerDeg) << ','
          << (truth.psi ? format_double(*truth.psi / kRadPerDeg) : "") << ','
          << format_double(truth.range) << ',';
      if (est_index >= 0) {
        const SourceLocation& est = record.estimates[est_index];
        out << format_double(est.phi / kRadPerDeg) << ','
            << (est.psi ? format_double(*est.psi / kRadPerDeg) : "") << ','
            << format_double(est.range) << ','
            << format_double(record.match.pair_errors[est_index]) << ',';
      } else {
        out << ",,,,";
      }
      out << (std::isnan(record.match.rmse) ? "" : format_double(record.match.rmse)) << ','
          << format_double(record.runtime_s) << ',';

      std::string flags;
      const auto add_flag = [&flags](const char* name) {
        if (!flags.empty()) flags += '|';
        flags += name;
      };
      if (record.aborted) add_flag("abort");
      if (record.shortfall) add_flag("shortfall");
      if (est_index < 0) add_flag("miss");
      out << flags << '\n';
    }
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

namespace {

struct CellStats {
  std::vector<double> rmse;
  std::vector<double> runtime;
  int misses = 0;
  int trials = 0;
};

std::string cells_to_json(const std::map<std::pair<std::string, double>, CellStats>& cells,
                          const std::string& axis) {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& [key, stats] : cells) {
    nlohmann::json point;
    point["method"] = key.first;
    point["sweep"] = key.second;
    point["trials"] = stats.trials;
    point["misses"] = stats.misses;
    if (!stats.rmse.empty()) {
      point["median_rmse_m"] = median(stats.rmse);
      point["mean_rmse_m"] =
          std::accumulate(stats.rmse.begin(), stats.rmse.end(), 0.0) / stats.rmse.size();
    }
    point["median_runtime_s"] = median(stats.runtime);
    point["mean_runtime_s"] =
        std::accumulate(stats.runtime.begin(), stats.runtime.end(), 0.0) / stats.runtime.size();
    points.push_back(std::move(point));
  }
  nlohmann::json doc;
  doc["axis"] = axis;
  doc["points"] = std::move(points);
  return doc.dump(2);
}

}  // namespace

std::string summarize_records(std::span<const TrialRecord> records) {
  std::map<std::pair<std::string, double>, CellStats> cells;
  for (const TrialRecord& record : records) {
    CellStats& cell = cells[{record.method, record.sweep_value}];
    ++cell.trials;
    cell.misses += record.match.misses;
    if (!std::isnan(record.match.rmse)) cell.rmse.push_back(record.match.rmse);
    cell.runtime.push_back(record.runtime_s);
  }
  return cells_to_json(cells, "sweep");
}

std::string summarize_csv_files(const std::vector<std::filesystem::path>& csv_paths) {
  std::map<std::pair<std::string, double>, CellStats> cells;
  std::map<std::tuple<std::string, double, int>, bool> seen_trial;

  for (const auto& path : csv_paths) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      std::vector<std::string> fields;
      std::stringstream row(line);
      std::string field;
      while (std::getline(row, field, ',')) fields.push_back(field);
      fields.resize(15);

      const std::string& method = fields[2];
      const double sweep = std::stod(fields[0]);
      const int trial = std::stoi(fields[1]);
      CellStats& cell = cells[{method, sweep}];
      if (fields[14].find("miss") != std::string::npos) ++cell.misses;

      // Trial-level columns repeat on every per-source row.
      if (seen_trial[{method, sweep, trial}]) continue;
      seen_trial[{method, sweep, trial}] = true;

      ++cell.trials;
      if (!fields[12].empty()) cell.rmse.push_back(std::stod(fields[12]));
      cell.runtime.push_back(std::stod(fields[13]));
    }
  }
  return cells_to_json(cells, "sweep");
}

}  // namespace nfloc
