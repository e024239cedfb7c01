#pragma once

#include <filesystem>

#include "nfloc/channel.hpp"

namespace nfloc {

// Snapshot container format "NFSN v1". Little-endian binary layout:
//   magic "NFSN", u32 version = 1, u32 M, u32 T, f64 lambda,
//   u8 kind (0 = ULA, 1 = UPA),
//   ULA: u32 elements, f64 spacing   |   UPA: u32 ex, u32 ey, f64 spacing,
//   u8 has_truth, [u32 K, per source: f64 phi, (f64 psi for UPA), f64 range],
//   M*T complex samples as (f64 re, f64 im), snapshot-major (t outer, m inner).
void write_nfsn(const std::filesystem::path& path, const SnapshotMatrix& snapshots);

SnapshotMatrix read_nfsn(const std::filesystem::path& path);

}  // namespace nfloc
