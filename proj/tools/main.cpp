#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "sqglab/snapshot_io.hpp"
#include "sqglab/solver.hpp"
#include "sqglab/version.hpp"

using namespace sqglab::cli;

int main(int argc, char** argv) {
  CLI::App app{"Surface quasi-geostrophic experiments and regularity diagnostics"};
  app.set_version_flag("--version", std::string(sqglab::version));
  app.require_subcommand(1);

  GlobalOptions opt;
  std::string config;
  std::string out = "out";
  std::uint64_t seed = 0;
  unsigned threads = 0;
  app.add_option("--config", config, "Experiment configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", out, "Output directory");
  auto* seed_opt = app.add_option("--seed-override", seed, "Replace every seed in the configuration");
  app.add_option("--threads", threads, "Worker threads (default: SQGLAB_THREADS or 1)")->check(CLI::PositiveNumber);

  app.add_subcommand("run", "Integrate the equation and write a trajectory directory");

  auto* diagnose = app.add_subcommand("diagnose", "Verify inequalities on a stored trajectory");
  std::string traj;
  std::vector<std::string> checks;
  diagnose->add_option("--traj", traj, "Trajectory directory")->required();
  diagnose->add_option("--checks", checks, "Subset of checks (default: config or all)")->delimiter(',');

  auto* lemmas = app.add_subcommand("lemmas", "Barrier functions, constants and the isoperimetric inequality");
  std::vector<std::string> lemma_checks;
  lemmas->add_option("--check", lemma_checks, "b1, b2, constants, isoperimetric or all")->delimiter(',');

  app.add_subcommand("galerkin", "Galerkin truncation on the box");

  auto* holder = app.add_subcommand("holder", "Hoelder exponent fits from oscillation decay");
  std::string holder_traj, points;
  holder->add_option("--traj", holder_traj, "Trajectory directory")->required();
  holder->add_option("--points", points, "random:<count>:<seed> or a file of points")->required();

  auto* bench = app.add_subcommand("bench", "Throughput of the main kernels (CSV)");
  BenchOptions bench_opt;
  bench->add_option("--sizes", bench_opt.sizes, "Grid sizes per axis")->delimiter(',');
  bench->add_option("--steps", bench_opt.steps, "Time steps per size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_usage;
  }

  if (!config.empty()) opt.config = config;
  opt.out = out;
  if (*seed_opt) opt.seed_override = seed;
  if (threads == 0) {
    if (const char* env = std::getenv("SQGLAB_THREADS")) {
      try {
        threads = static_cast<unsigned>(std::stoul(env));
      } catch (const std::exception&) {
        threads = 0;
      }
      if (threads == 0) {
        std::cerr << "error: SQGLAB_THREADS must be a positive integer\n";
        return exit_usage;
      }
    }
  }
  opt.threads = threads == 0 ? 1 : threads;

  try {
    if (app.got_subcommand("run")) return cmd_run(opt);
    if (app.got_subcommand(diagnose)) return cmd_diagnose(opt, traj, checks);
    if (app.got_subcommand(lemmas)) return cmd_lemmas(opt, lemma_checks);
    if (app.got_subcommand("galerkin")) return cmd_galerkin(opt);
    if (app.got_subcommand(holder)) return cmd_holder(opt, holder_traj, points);
    if (app.got_subcommand(bench)) return cmd_bench(opt, bench_opt);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_usage;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return exit_usage;
  } catch (const sqglab::FormatError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return exit_usage;
  } catch (const sqglab::DivergenceError& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return exit_runtime;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return exit_runtime;
  }
  return exit_usage;
}
