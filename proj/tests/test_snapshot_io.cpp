#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "nfloc/snapshot_io.hpp"

using namespace nfloc;

namespace {

std::filesystem::path temp_file(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

std::string file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("NFSN round trip is bit exact") {
  Scenario scenario{ArrayGeometry::ula(12, 0.005),
                    0.02,
                    {{SourceLocation{0.3, 2.5}, 10.0}, {SourceLocation{-0.5, 7.0}, 0.0}},
                    33,
                    ChannelModel::rician(10.0),
                    42,
                    false};
  const SnapshotMatrix original = simulate_snapshots(scenario);

  const auto path = temp_file("nfloc_roundtrip.nfsn");
  write_nfsn(path, original);
  const SnapshotMatrix loaded = read_nfsn(path);

  CHECK(loaded.data.rows() == original.data.rows());
  CHECK(loaded.data.cols() == original.data.cols());
  CHECK(loaded.data == original.data);  // exact, not approximate
  CHECK(loaded.lambda == original.lambda);
  CHECK(loaded.geometry == original.geometry);
  REQUIRE(loaded.truth.size() == original.truth.size());
  for (std::size_t i = 0; i < loaded.truth.size(); ++i) {
    CHECK(loaded.truth[i].phi == original.truth[i].phi);
    CHECK(loaded.truth[i].range == original.truth[i].range);
  }

  // Writing the loaded copy reproduces the file byte for byte.
  const auto path2 = temp_file("nfloc_roundtrip2.nfsn");
  write_nfsn(path2, loaded);
  CHECK(file_bytes(path) == file_bytes(path2));
  std::filesystem::remove(path);
  std::filesystem::remove(path2);
}

TEST_CASE("NFSN planar geometry and truthless files") {
  Scenario scenario{ArrayGeometry::upa(4, 3, 0.01),
                    0.02,
                    {{SourceLocation{0.2, -0.1, 1.5}, 5.0}},
                    9,
                    ChannelModel::pure_los(),
                    1,
                    true};
  SnapshotMatrix snap = simulate_snapshots(scenario);
  snap.truth.clear();

  const auto path = temp_file("nfloc_upa.nfsn");
  write_nfsn(path, snap);
  const SnapshotMatrix loaded = read_nfsn(path);
  CHECK(loaded.geometry == snap.geometry);
  CHECK(loaded.truth.empty());
  CHECK(loaded.data == snap.data);
  std::filesystem::remove(path);
}

TEST_CASE("NFSN rejects foreign files") {
  const auto path = temp_file("nfloc_bogus.nfsn");
  {
    std::ofstream out(path, std::ios::binary);
    out << "not a snapshot container";
  }
  CHECK_THROWS(read_nfsn(path));
  std::filesystem::remove(path);
}
