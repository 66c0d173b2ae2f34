#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sqglab/solver.hpp"

namespace sqglab::cli {

/// Malformed or incomplete experiment configuration; `line` is 0 when the problem is not tied to one line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, std::size_t line, const std::string& what);
  std::size_t line;
};

/// INI-style document:
///
///   version = 1
///   [solver]
///   t_end = 0.1   # comment
///
/// Keys outside the known schema are rejected at parse time, with the line number.
class ExperimentConfig {
 public:
  static constexpr int supported_version = 1;

  static ExperimentConfig parse(std::string_view text, std::string source = "<config>");
  static ExperimentConfig load(const std::filesystem::path& path);

  bool has(const std::string& section, const std::string& key) const;
  /// Raw value; throws ConfigError naming the missing key when absent.
  const std::string& require(const std::string& section, const std::string& key) const;

  std::string get_string(const std::string& section, const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  double require_double(const std::string& section, const std::string& key) const;
  long long get_int(const std::string& section, const std::string& key, long long fallback) const;
  std::uint64_t require_seed(const std::string& section, const std::string& key) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& section, const std::string& key) const;
  std::vector<std::string> get_words(const std::string& section, const std::string& key) const;

  /// Throws ConfigError pointing at the line of section.key.
  [[noreturn]] void reject(const std::string& section, const std::string& key, const std::string& why) const;

  /// Replaces every seed key that is present (and initial.seed unconditionally).
  void override_seeds(std::uint64_t seed);

  /// Sorted `[section] key = value` lines, independent of comments and ordering.
  std::string canonical() const;
  std::string hash() const;
  const std::string& source() const { return source_; }

 private:
  struct Entry {
    std::string value;
    std::size_t line;
  };
  std::string source_;
  std::map<std::string, std::map<std::string, Entry>> entries_;

  const Entry* find(const std::string& section, const std::string& key) const;
};

/// Solver settings from [grid], [solver] and [initial].
SolverConfig solver_config(const ExperimentConfig& cfg);

}  // namespace sqglab::cli
