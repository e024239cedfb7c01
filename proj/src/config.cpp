#include "nfloc/config.hpp"

#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace nfloc {

namespace {

constexpr double kRadPerDeg = std::numbers::pi / 180.0;

ArrayGeometry geometry_from_json(const nlohmann::json& node) {
  const std::string kind = node.at("kind").get<std::string>();
  const double spacing = node.at("spacing_m").get<double>();
  if (kind == "ula") {
    return ArrayGeometry::ula(node.at("elements").get<int>(), spacing);
  }
  if (kind == "upa") {
    return ArrayGeometry::upa(node.at("elements_x").get<int>(), node.at("elements_y").get<int>(),
                              spacing);
  }
  throw std::invalid_argument("geometry kind must be 'ula' or 'upa'");
}

ChannelModel channel_from_json(const nlohmann::json& node) {
  if (node.is_null()) return ChannelModel::pure_los();
  const std::string model = node.value("model", "pure_los");
  if (model == "pure_los") return ChannelModel::pure_los();
  if (model != "rician") throw std::invalid_argument("channel model must be 'pure_los' or 'rician'");
  const double kappa = node.at("kappa").get<double>();
  const std::string correlation = node.value("correlation", "iid");
  if (correlation == "iid") return ChannelModel::rician(kappa);
  if (correlation == "local_scattering") {
    return ChannelModel::rician_local_scattering(
        kappa, node.value("angular_spread_deg", 10.0) * kRadPerDeg);
  }
  throw std::invalid_argument("correlation must be 'iid' or 'local_scattering'");
}

SourceLocation location_from_json(const nlohmann::json& node, bool planar) {
  const double phi = node.at("phi_deg").get<double>() * kRadPerDeg;
  const double range = node.at("range_m").get<double>();
  if (planar) return {phi, node.at("psi_deg").get<double>() * kRadPerDeg, range};
  return {phi, range};
}

SearchDomain domain_from_json(const nlohmann::json& root, const ArrayGeometry& geometry,
                              double lambda) {
  SearchDomain domain = SearchDomain::for_geometry(geometry, lambda);
  if (!root.contains("domain")) return domain;
  const nlohmann::json& node = root.at("domain");
  if (node.contains("phi_deg")) {
    domain.phi = {node["phi_deg"][0].get<double>() * kRadPerDeg,
                  node["phi_deg"][1].get<double>() * kRadPerDeg};
  }
  if (node.contains("psi_deg") && !geometry.is_ula()) {
    domain.psi = {{node["psi_deg"][0].get<double>() * kRadPerDeg,
                   node["psi_deg"][1].get<double>() * kRadPerDeg}};
  }
  if (node.contains("range_m")) {
    domain.range = {node["range_m"][0].get<double>(), node["range_m"][1].get<double>()};
  }
  return domain;
}

nlohmann::json parse(const std::string& text) { return nlohmann::json::parse(text); }

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

Scenario scenario_from_json(const std::string& text) {
  const nlohmann::json doc = parse(text);
  Scenario scenario{geometry_from_json(doc.at("geometry")),
                    doc.at("lambda_m").get<double>(),
                    {},
                    doc.at("snapshots").get<int>(),
                    channel_from_json(doc.value("channel", nlohmann::json{})),
                    doc.value("seed", std::uint64_t{0}),
                    doc.value("noiseless", false)};
  const bool planar = !scenario.geometry.is_ula();
  for (const nlohmann::json& node : doc.at("sources")) {
    scenario.sources.push_back(
        {location_from_json(node, planar), node.value("snr_db", 0.0)});
  }
  return scenario;
}

Scenario load_scenario(const std::filesystem::path& path) {
  return scenario_from_json(slurp(path));
}

BenchmarkConfig benchmark_from_json(const std::string& text) {
  const nlohmann::json doc = parse(text);
  BenchmarkConfig config{geometry_from_json(doc.at("geometry")),
                         doc.at("lambda_m").get<double>(),
                         doc.value("snapshots", 200),
                         channel_from_json(doc.value("channel", nlohmann::json{})),
                         SearchDomain{},
                         doc.value("k", 3),
                         doc.value("snr_db", 20.0),
                         doc.value("snr_deviation_db", 0.0),
                         SweepAxis::Snr,
                         {},
                         doc.value("trials", 1),
                         {},
                         GridSpec{},
                         doc.value("seed", std::uint64_t{0}),
                         false,
                         {}};
  config.domain = domain_from_json(doc, config.geometry, config.lambda);

  const nlohmann::json& sweep = doc.at("sweep");
  const std::string axis = sweep.at("axis").get<std::string>();
  if (axis == "snr") {
    config.axis = SweepAxis::Snr;
  } else if (axis == "k") {
    config.axis = SweepAxis::SourceCount;
  } else if (axis == "snr_deviation") {
    config.axis = SweepAxis::SnrDeviation;
  } else if (axis == "grid_size") {
    config.axis = SweepAxis::GridSize;
  } else {
    throw std::invalid_argument("sweep axis must be snr, k, snr_deviation, or grid_size");
  }
  config.values = sweep.at("values").get<std::vector<double>>();
  config.methods = doc.at("methods").get<std::vector<std::string>>();

  if (doc.contains("grid")) {
    const nlohmann::json& grid = doc.at("grid");
    config.grid.n_phi = grid.value("angle", 200);
    config.grid.n_psi = config.geometry.is_ula() ? 0 : grid.value("elevation", config.grid.n_phi);
    config.grid.n_range = grid.value("range", 1000);
  } else if (!config.geometry.is_ula()) {
    config.grid.n_psi = config.grid.n_phi;
  }

  config.noiseless = doc.value("noiseless", false);
  if (doc.contains("sources")) {
    for (const nlohmann::json& node : doc.at("sources")) {
      config.fixed_sources.push_back(location_from_json(node, !config.geometry.is_ula()));
    }
  }
  return config;
}

BenchmarkConfig load_benchmark(const std::filesystem::path& path) {
  return benchmark_from_json(slurp(path));
}

}  // namespace nfloc
