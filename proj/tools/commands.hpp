#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sqglab::cli {

enum ExitCode : int { exit_ok = 0, exit_check_failed = 1, exit_usage = 2, exit_runtime = 3 };

/// Bad command-line input that the parser itself cannot catch (exit 2).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GlobalOptions {
  std::optional<std::filesystem::path> config;
  std::filesystem::path out = "out";
  std::optional<std::uint64_t> seed_override;
  unsigned threads = 1;
};

int cmd_run(const GlobalOptions& opt);

/// Empty `checks` selects [diagnostics] checks from the config, or all of them.
int cmd_diagnose(const GlobalOptions& opt, const std::filesystem::path& traj, std::vector<std::string> checks);

/// checks from {b1, b2, constants, isoperimetric, all}.
int cmd_lemmas(const GlobalOptions& opt, std::vector<std::string> checks);

int cmd_galerkin(const GlobalOptions& opt);

/// points: "random:<count>:<seed>" or a text file with one point per line.
int cmd_holder(const GlobalOptions& opt, const std::filesystem::path& traj, const std::string& points);

struct BenchOptions {
  std::vector<std::size_t> sizes{32, 64, 128};
  std::size_t steps = 20;
};

int cmd_bench(const GlobalOptions& opt, const BenchOptions& bench);

/// Every check name understood by cmd_diagnose, in report order.
const std::vector<std::string>& diagnose_check_names();

}  // namespace sqglab::cli
