// Command-line front end: scenario simulation, the three localizers, and
// the Monte-Carlo benchmark driver. See README.md for the JSON schemas.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "nfloc/config.hpp"
#include "nfloc/eval.hpp"
#include "nfloc/snapshot_io.hpp"
#include "nfloc/subspace.hpp"

namespace {

constexpr double kRadPerDeg = std::numbers::pi / 180.0;

nfloc::ArrayGeometry parse_geometry(const std::string& token) {
  std::vector<std::string> parts;
  std::stringstream stream(token);
  std::string part;
  while (std::getline(stream, part, ':')) parts.push_back(part);
  if (parts.size() == 3 && parts[0] == "ula") {
    return nfloc::ArrayGeometry::ula(std::stoi(parts[1]), std::stod(parts[2]));
  }
  if (parts.size() == 4 && parts[0] == "upa") {
    return nfloc::ArrayGeometry::upa(std::stoi(parts[1]), std::stoi(parts[2]), std::stod(parts[3]));
  }
  throw CLI::ValidationError("geometry must be ula:M:spacing or upa:MX:MY:spacing");
}

nfloc::GridSpec parse_grid(const std::string& token, bool planar) {
  std::vector<int> parts;
  std::stringstream stream(token);
  std::string part;
  while (std::getline(stream, part, 'x')) parts.push_back(std::stoi(part));
  if (!planar && parts.size() == 2) return {parts[0], 0, parts[1]};
  if (planar && parts.size() == 3) return {parts[0], parts[1], parts[2]};
  throw CLI::ValidationError(planar ? "planar grids are AxBxC" : "linear grids are AxB");
}

std::string fmt(double value) {
  char buffer[32];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

nlohmann::json location_to_json(const nfloc::SourceLocation& loc) {
  nlohmann::json node;
  node["phi_deg"] = loc.phi / kRadPerDeg;
  if (loc.psi) node["psi_deg"] = *loc.psi / kRadPerDeg;
  node["range_m"] = loc.range;
  return node;
}

int run_steer(const std::string& geometry_token, double phi_deg, std::optional<double> psi_deg,
              double range, double lambda, const std::string& model_name,
              const std::string& out_path) {
  const nfloc::ArrayGeometry geometry = parse_geometry(geometry_token);
  const nfloc::SourceLocation loc =
      psi_deg ? nfloc::SourceLocation(phi_deg * kRadPerDeg, *psi_deg * kRadPerDeg, range)
              : nfloc::SourceLocation(phi_deg * kRadPerDeg, range);
  nfloc::PhaseModel model = nfloc::default_phase_model(geometry);
  if (model_name == "fresnel") model = nfloc::PhaseModel::Fresnel;
  if (model_name == "exact") model = nfloc::PhaseModel::Exact;

  const Eigen::VectorXcd a = nfloc::steering_vector(geometry, loc, lambda, model);
  std::ofstream file;
  if (!out_path.empty()) file.open(out_path);
  std::ostream& out = out_path.empty() ? std::cout : file;
  out << "m,re,im\n";
  for (int m = 0; m < a.size(); ++m) {
    out << (m + 1) << ',' << fmt(a(m).real()) << ',' << fmt(a(m).imag()) << '\n';
  }
  return 0;
}

int run_simulate(const std::string& config_path, const std::string& out_path) {
  const nfloc::Scenario scenario = nfloc::load_scenario(config_path);
  nfloc::write_nfsn(out_path, nfloc::simulate_snapshots(scenario));
  std::cout << "wrote " << out_path << " (" << scenario.geometry.element_count() << " x "
            << scenario.snapshots << ")\n";
  return 0;
}

int run_localize(const std::string& in_path, const std::string& method, int k,
                 const std::string& grid_token, std::uint64_t seed, const std::string& out_path,
                 const std::string& trace_path) {
  const nfloc::SnapshotMatrix snapshots = nfloc::read_nfsn(in_path);
  const nfloc::SearchDomain domain =
      nfloc::SearchDomain::for_geometry(snapshots.geometry, snapshots.lambda);
  const bool planar = !snapshots.geometry.is_ula();

  nfloc::LocalizationResult result;
  if (method == "nemo") {
    result = nfloc::nemo_de(snapshots, k, domain, nfloc::nemo_default_config(seed),
                            nfloc::PenaltyConfig{});
  } else if (method == "neef") {
    result = nfloc::neef_de(snapshots, k, domain, nfloc::neef_default_config(k, seed));
  } else if (method == "music") {
    nfloc::GridSpec grid = planar ? nfloc::GridSpec{200, 200, 400} : nfloc::GridSpec{200, 0, 1000};
    if (!grid_token.empty()) grid = parse_grid(grid_token, planar);
    result = nfloc::music_localize(snapshots, k, domain, grid);
  } else {
    throw CLI::ValidationError("method must be nemo, neef, or music");
  }

  nlohmann::json doc;
  doc["method"] = result.method;
  doc["k"] = k;
  doc["runtime_s"] = result.runtime_s;
  doc["estimates"] = nlohmann::json::array();
  for (const nfloc::SourceLocation& loc : result.estimates) {
    doc["estimates"].push_back(location_to_json(loc));
  }
  doc["per_source_cost"] = result.per_source_cost;
  if (result.aborted) doc["abort_reason"] = result.abort_reason;
  doc["shortfall"] = result.shortfall;
  if (!snapshots.truth.empty()) {
    const nfloc::MatchResult match =
        nfloc::match_and_rmse(snapshots.truth, result.estimates, snapshots.geometry);
    if (!std::isnan(match.rmse)) doc["matched_rmse_m"] = match.rmse;
    doc["misses"] = match.misses;
  }

  if (!trace_path.empty() && !result.traces.empty()) {
    // Sequential runs are concatenated; the generation counter restarting
    // at zero marks each new detection's search.
    std::ofstream trace(trace_path);
    trace << "generation,best_cost,mean_cost\n";
    for (const nfloc::DERunResult& de : result.traces) {
      for (std::size_t g = 0; g < de.trace.size(); ++g) {
        trace << g << ',' << fmt(de.trace[g]) << ',' << fmt(de.mean_trace[g]) << '\n';
      }
    }
  }

  if (out_path.empty()) {
    std::cout << doc.dump(2) << '\n';
  } else {
    std::ofstream(out_path) << doc.dump(2) << '\n';
    std::cout << "wrote " << out_path << '\n';
  }
  return result.aborted || result.shortfall ? 2 : 0;
}

int run_spectrum(const std::string& in_path, int k, const std::string& grid_token,
                 const std::string& out_path) {
  const nfloc::SnapshotMatrix snapshots = nfloc::read_nfsn(in_path);
  const bool planar = !snapshots.geometry.is_ula();
  const nfloc::SearchDomain domain =
      nfloc::SearchDomain::for_geometry(snapshots.geometry, snapshots.lambda);
  nfloc::GridSpec spec = planar ? nfloc::GridSpec{100, 100, 200} : nfloc::GridSpec{200, 0, 1000};
  if (!grid_token.empty()) spec = parse_grid(grid_token, planar);

  const Eigen::MatrixXcd covariance = nfloc::sample_covariance(snapshots.data);
  const Eigen::MatrixXcd noise_basis = nfloc::noise_subspace(covariance, k);
  const nfloc::Grid grid = nfloc::Grid::make(domain, spec);
  const std::vector<double> spectrum =
      nfloc::music_spectrum(noise_basis, grid, snapshots.geometry, snapshots.lambda,
                            nfloc::default_phase_model(snapshots.geometry));

  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot open " + out_path);
  out << (planar ? "phi_deg,r_m,psi_deg,value\n" : "phi_deg,r_m,value\n");
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    const nfloc::SourceLocation node = grid.node(i);
    out << fmt(node.phi / kRadPerDeg) << ',' << fmt(node.range);
    if (planar) out << ',' << fmt(*node.psi / kRadPerDeg);
    out << ',' << fmt(spectrum[i]) << '\n';
  }
  std::cout << "wrote " << out_path << " (" << spectrum.size() << " nodes)\n";
  return 0;
}

int run_bench(const std::string& config_path, const std::string& out_dir) {
  const nfloc::BenchmarkConfig config = nfloc::load_benchmark(config_path);
  std::filesystem::create_directories(out_dir);
  const std::vector<nfloc::TrialRecord> records = nfloc::run_benchmark(config);

  const auto csv_path = std::filesystem::path(out_dir) / "results.csv";
  nfloc::write_results_csv(csv_path, records);
  const auto summary_path = std::filesystem::path(out_dir) / "summary.json";
  std::ofstream(summary_path) << nfloc::summarize_records(records) << '\n';
  std::cout << "wrote " << csv_path << " and " << summary_path << '\n';
  return 0;
}

int run_report(const std::string& in_dir, const std::string& out_path) {
  std::vector<std::filesystem::path> csv_files;
  const std::filesystem::path in(in_dir);
  if (std::filesystem::is_directory(in)) {
    for (const auto& entry : std::filesystem::directory_iterator(in)) {
      if (entry.path().extension() == ".csv") csv_files.push_back(entry.path());
    }
    std::sort(csv_files.begin(), csv_files.end());
  } else {
    csv_files.push_back(in);
  }
  if (csv_files.empty()) throw std::runtime_error("no CSV files under " + in_dir);
  std::ofstream(out_path) << nfloc::summarize_csv_files(csv_files) << '\n';
  std::cout << "wrote " << out_path << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"near-field multi-source localization toolkit"};
  app.require_subcommand(1);

  // steer
  std::string geometry_token, model_name = "default", steer_out;
  double phi_deg = 0.0, range = 1.0, lambda = 0.02;
  std::optional<double> psi_deg;
  auto* steer = app.add_subcommand("steer", "dump a steering vector as CSV (m,re,im)");
  steer->add_option("--geometry", geometry_token, "ula:M:spacing or upa:MX:MY:spacing")->required();
  steer->add_option("--phi", phi_deg, "azimuth [deg]")->required();
  steer->add_option("--psi", psi_deg, "elevation [deg], planar arrays");
  steer->add_option("--r", range, "range [m]")->required();
  steer->add_option("--lambda", lambda, "wavelength [m]")->required();
  steer->add_option("--model", model_name, "fresnel | exact (default per geometry)");
  steer->add_option("--out", steer_out, "output file (stdout when omitted)");

  // simulate
  std::string sim_config, sim_out;
  auto* simulate = app.add_subcommand("simulate", "generate snapshots from a scenario JSON");
  simulate->add_option("--config", sim_config, "scenario JSON")->required()->check(CLI::ExistingFile);
  simulate->add_option("--out", sim_out, "output NFSN file")->required();

  // localize
  std::string loc_in, loc_method, loc_grid, loc_out, loc_trace;
  int loc_k = 3;
  std::uint64_t loc_seed = 0;
  auto* localize = app.add_subcommand("localize", "estimate source locations from snapshots");
  localize->add_option("--in", loc_in, "NFSN snapshot file")->required()->check(CLI::ExistingFile);
  localize->add_option("--method", loc_method, "nemo | neef | music")->required();
  localize->add_option("--k", loc_k, "number of sources")->required();
  localize->add_option("--grid", loc_grid, "music grid, AxB or AxBxC");
  localize->add_option("--seed", loc_seed, "optimizer seed");
  localize->add_option("--out", loc_out, "result JSON (stdout when omitted)");
  localize->add_option("--trace", loc_trace, "optimizer trace CSV (generation,best,mean)");

  // spectrum
  std::string spec_in, spec_grid, spec_out;
  int spec_k = 3;
  auto* spectrum = app.add_subcommand("spectrum", "dump the MUSIC pseudospectrum over a grid");
  spectrum->add_option("--in", spec_in, "NFSN snapshot file")->required()->check(CLI::ExistingFile);
  spectrum->add_option("--k", spec_k, "number of sources")->required();
  spectrum->add_option("--grid", spec_grid, "grid, AxB or AxBxC");
  spectrum->add_option("--out", spec_out, "output CSV")->required();

  // bench
  std::string bench_config, bench_out;
  auto* bench = app.add_subcommand("bench", "run a Monte-Carlo benchmark sweep");
  bench->add_option("--config", bench_config, "benchmark JSON")->required()->check(CLI::ExistingFile);
  bench->add_option("--out", bench_out, "output directory")->required();

  // report
  std::string report_in, report_out;
  auto* report = app.add_subcommand("report", "aggregate results CSVs into a summary JSON");
  report->add_option("--in", report_in, "results directory or CSV")->required();
  report->add_option("--out", report_out, "summary JSON path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (steer->parsed()) {
      return run_steer(geometry_token, phi_deg, psi_deg, range, lambda, model_name, steer_out);
    }
    if (simulate->parsed()) return run_simulate(sim_config, sim_out);
    if (localize->parsed()) {
      return run_localize(loc_in, loc_method, loc_k, loc_grid, loc_seed, loc_out, loc_trace);
    }
    if (spectrum->parsed()) return run_spectrum(spec_in, spec_k, spec_grid, spec_out);
    if (bench->parsed()) return run_bench(bench_config, bench_out);
    if (report->parsed()) return run_report(report_in, report_out);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  }
  return 0;
}
