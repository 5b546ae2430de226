#pragma once

#include <filesystem>

#include "fbl/littlewood_paley.hpp"
#include "fbl/spectral.hpp"

namespace fbl {

/// Binary snapshot, little-endian:
///   "FBRG", u32 version = 1, u64 N, f64 L, f64 t, f64 alpha, f64 nu, N x f64 samples.
struct SnapshotFile {
  Snapshot snapshot;
  EvolutionParams params;
};

inline constexpr std::uint32_t kSnapshotVersion = 1;

void write_snapshot(const std::filesystem::path& path, const Snapshot& snapshot, const EvolutionParams& params);

/// Throws Error on a bad magic, version, size or truncated payload.
SnapshotFile read_snapshot(const std::filesystem::path& path);

}  // namespace fbl
