#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "sqglab/extension.hpp"
#include "sqglab/grid.hpp"

namespace sqglab {

/// Malformed or truncated snapshot file.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// SQGF, little-endian:
//   "SQGF" | u32 version=1 | u32 N | N x u64 dims | N x f64 lengths | f64 time_tag | f64 values (row-major)
// An absent time tag is written as NaN and read back as nullopt.
void write_sqgf(const std::filesystem::path& path, const PhysicalField& f);
PhysicalField read_sqgf(const std::filesystem::path& path);
std::string encode_sqgf(const PhysicalField& f);
PhysicalField decode_sqgf(const std::string& bytes);

// SQGE, little-endian:
//   "SQGE" | u32 version=1 | u32 N | N x u64 dims | N x f64 lengths | u64 nz | nz x f64 z | f64 values (z-major)
void write_sqge(const std::filesystem::path& path, const ExtensionField& e);
ExtensionField read_sqge(const std::filesystem::path& path);

}  // namespace sqglab
