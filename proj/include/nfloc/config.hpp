#pragma once

#include <filesystem>
#include <string>

#include "nfloc/eval.hpp"

namespace nfloc {

// JSON bindings for the scenario and benchmark documents consumed by the
// CLI. All angles are degrees, distances meters, and SNRs dB at this
// boundary; the library itself works in radians.

Scenario scenario_from_json(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);

BenchmarkConfig benchmark_from_json(const std::string& text);
BenchmarkConfig load_benchmark(const std::filesystem::path& path);

}  // namespace nfloc
