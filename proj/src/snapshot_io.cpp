#include "nfloc/snapshot_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace nfloc {

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>(v), static_cast<char>(v >> 8),
                         static_cast<char>(v >> 16), static_cast<char>(v >> 24)};
  out.write(bytes, 4);
}

void put_f64(std::ostream& out, double d) {
  auto v = std::bit_cast<std::uint64_t>(d);
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>(v >> (8 * i));
  out.write(bytes, 8);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char bytes[4];
  in.read(reinterpret_cast<char*>(bytes), 4);
  return static_cast<std::uint32_t>(bytes[0]) | (static_cast<std::uint32_t>(bytes[1]) << 8) |
         (static_cast<std::uint32_t>(bytes[2]) << 16) | (static_cast<std::uint32_t>(bytes[3]) << 24);
}

double get_f64(std::istream& in) {
  unsigned char bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return std::bit_cast<double>(v);
}

}  // namespace

void write_nfsn(const std::filesystem::path& path, const SnapshotMatrix& snapshots) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");

  const auto m = static_cast<std::uint32_t>(snapshots.data.rows());
  const auto t = static_cast<std::uint32_t>(snapshots.data.cols());
  out.write("NFSN", 4);
  put_u32(out, 1);
  put_u32(out, m);
  put_u32(out, t);
  put_f64(out, snapshots.lambda);

  const ArrayGeometry& g = snapshots.geometry;
  out.put(g.is_ula() ? '\0' : '\1');
  if (g.is_ula()) {
    put_u32(out, static_cast<std::uint32_t>(g.element_count()));
  } else {
    put_u32(out, static_cast<std::uint32_t>(g.elements_x()));
    put_u32(out, static_cast<std::uint32_t>(g.elements_y()));
  }
  put_f64(out, g.spacing());

  out.put(snapshots.truth.empty() ? '\0' : '\1');
  if (!snapshots.truth.empty()) {
    put_u32(out, static_cast<std::uint32_t>(snapshots.truth.size()));
    for (const SourceLocation& loc : snapshots.truth) {
      put_f64(out, loc.phi);
      if (!g.is_ula()) put_f64(out, loc.psi.value());
      put_f64(out, loc.range);
    }
  }

  for (std::uint32_t col = 0; col < t; ++col) {
    for (std::uint32_t row = 0; row < m; ++row) {
      put_f64(out, snapshots.data(row, col).real());
      put_f64(out, snapshots.data(row, col).imag());
    }
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

SnapshotMatrix read_nfsn(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());

  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "NFSN", 4) != 0) {
    throw std::runtime_error(path.string() + " is not an NFSN file");
  }
  const std::uint32_t version = get_u32(in);
  if (version != 1) throw std::runtime_error("unsupported NFSN version");
  const std::uint32_t m = get_u32(in);
  const std::uint32_t t = get_u32(in);
  const double lambda = get_f64(in);

  const int kind = in.get();
  ArrayGeometry geometry = [&] {
    if (kind == 0) {
      const std::uint32_t elements = get_u32(in);
      return ArrayGeometry::ula(static_cast<int>(elements), get_f64(in));
    }
    const std::uint32_t ex = get_u32(in);
    const std::uint32_t ey = get_u32(in);
    return ArrayGeometry::upa(static_cast<int>(ex), static_cast<int>(ey), get_f64(in));
  }();
  if (static_cast<std::uint32_t>(geometry.element_count()) != m) {
    throw std::runtime_error("NFSN geometry does not match the sample count");
  }

  SnapshotMatrix snap{Eigen::MatrixXcd(m, t), geometry, lambda, {}};
  if (in.get() != 0) {
    const std::uint32_t count = get_u32(in);
    snap.truth.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
      const double phi = get_f64(in);
      if (geometry.is_ula()) {
        snap.truth.emplace_back(phi, get_f64(in));
      } else {
        const double psi = get_f64(in);
        snap.truth.emplace_back(phi, psi, get_f64(in));
      }
    }
  }
  for (std::uint32_t col = 0; col < t; ++col) {
    for (std::uint32_t row = 0; row < m; ++row) {
      const double re = get_f64(in);
      const double im = get_f64(in);
      snap.data(row, col) = {re, im};
    }
  }
  if (!in) throw std::runtime_error("truncated NFSN file " + path.string());
  return snap;
}

}  // namespace nfloc
