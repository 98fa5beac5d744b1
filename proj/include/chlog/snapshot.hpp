#pragma once

// Binary snapshot, little-endian throughout:
//
//   magic    "CHLOG1\n"  7 bytes
//   version  u16         (1)
//   n        u32
//   step     u64
//   tau      f64
//   nu       f64
//   theta    f64
//   theta_c  f64
//   values   n*n f64, row-major

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "chlog/grid.hpp"
#include "chlog/scheme.hpp"
#include "chlog/stepper.hpp"

namespace chlog {

inline constexpr char kSnapshotMagic[] = "CHLOG1\n";
inline constexpr std::size_t kSnapshotMagicSize = 7;
inline constexpr std::uint16_t kSnapshotVersion = 1;
inline constexpr std::size_t kSnapshotHeaderSize = 7 + 2 + 4 + 8 + 4 * 8;

struct Snapshot {
  std::uint32_t n = 0;
  std::uint64_t step = 0;
  double tau = 0;
  double nu = 0;
  double theta = 0;
  double theta_c = 0;
  /// n*n samples, row-major.
  std::vector<double> values;
};

Snapshot make_snapshot(const SimState& state, const SchemeConfig& config);

/// Rebuilds the simulation state (spectrum recomputed from the samples).
SimState to_state(const Snapshot& snapshot);

std::vector<std::uint8_t> encode_snapshot(const Snapshot& snapshot);
Snapshot decode_snapshot(std::span<const std::uint8_t> bytes);

void save_snapshot(const Snapshot& snapshot, const std::filesystem::path& path);
Snapshot load_snapshot(const std::filesystem::path& path);

}  // namespace chlog
