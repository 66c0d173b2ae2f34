#pragma once

#include <filesystem>
#include <string>

#include "sqglab/solver.hpp"

namespace sqglab {

/// Writes a trajectory directory:
///   theta_<step>.sqgf     one file per snapshot (step zero-padded to 8 digits)
///   diagnostics.csv       time,l2,linf,hhalf,umax,energy_residual
///   manifest.json         solver configuration, snapshot index, version,
///                         `config_hash` and any `extra_json` object members
///   drift_<axis>.sqgf     prescribed drift components, if any
/// Output is byte-for-byte deterministic for a given trajectory.
void write_trajectory(const std::filesystem::path& dir, const Trajectory& traj, const std::string& config_hash = "",
                      const std::string& extra_json = "{}");

/// Reads a directory produced by write_trajectory. Throws FormatError on a
/// missing or malformed file.
Trajectory read_trajectory(const std::filesystem::path& dir);

/// Formats the per-step scalars with 17 significant digits.
std::string diagnostics_csv(const Trajectory& traj);

/// 64-bit FNV-1a, rendered as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace sqglab
