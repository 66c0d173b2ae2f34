#include "sqglab/trajectory_io.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "sqglab/snapshot_io.hpp"
#include "sqglab/version.hpp"

namespace sqglab {

namespace {

using nlohmann::json;

std::string snapshot_name(std::size_t step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "theta_%08zu.sqgf", step);
  return buf;
}

const char* kind_name(InitialCondition::Kind k) {
  switch (k) {
    case InitialCondition::Kind::random_band: return "random_band";
    case InitialCondition::Kind::two_vortex: return "two_vortex";
    case InitialCondition::Kind::single_mode: return "single_mode";
  }
  return "";
}

const char* drift_name(DriftMode d) {
  switch (d) {
    case DriftMode::sqg: return "sqg";
    case DriftMode::prescribed: return "prescribed";
    case DriftMode::zero: return "zero";
  }
  return "";
}

json config_json(const SolverConfig& c) {
  json j;
  j["dims"] = c.grid.dims();
  j["lengths"] = c.grid.lengths();
  j["beta"] = c.beta;
  j["kappa"] = c.kappa;
  j["dt"] = c.dt ? json(*c.dt) : json("auto");
  j["t_end"] = c.t_end;
  j["drift"] = drift_name(c.drift);
  j["closure"] = c.closure;
  j["dealias"] = c.dealias;
  j["snapshot_stride"] = c.snapshot_stride;
  j["cfl"] = c.cfl;
  j["max_steps"] = c.max_steps;
  json ic;
  ic["kind"] = kind_name(c.initial.kind);
  ic["k_min"] = c.initial.k_min;
  ic["k_max"] = c.initial.k_max;
  ic["amplitude"] = c.initial.amplitude;
  ic["seed"] = c.initial.seed;
  ic["mode"] = c.initial.mode;
  ic["vortex_width"] = c.initial.vortex_width;
  j["initial"] = ic;
  return j;
}

SolverConfig config_from_json(const json& j) {
  SolverConfig c;
  c.grid = Grid(j.at("dims").get<std::vector<std::size_t>>(), j.at("lengths").get<std::vector<double>>());
  c.beta = j.at("beta").get<double>();
  c.kappa = j.at("kappa").get<double>();
  if (j.at("dt").is_string()) {
    c.dt.reset();
  } else {
    c.dt = j.at("dt").get<double>();
  }
  c.t_end = j.at("t_end").get<double>();
  const auto drift = j.at("drift").get<std::string>();
  if (drift == "sqg") c.drift = DriftMode::sqg;
  else if (drift == "prescribed") c.drift = DriftMode::prescribed;
  else if (drift == "zero") c.drift = DriftMode::zero;
  else throw FormatError("manifest: unknown drift mode '" + drift + "'");
  c.closure = j.at("closure").get<std::vector<double>>();
  c.dealias = j.at("dealias").get<bool>();
  c.snapshot_stride = j.at("snapshot_stride").get<std::size_t>();
  c.cfl = j.at("cfl").get<double>();
  c.max_steps = j.at("max_steps").get<std::size_t>();
  const auto& ic = j.at("initial");
  const auto kind = ic.at("kind").get<std::string>();
  if (kind == "random_band") c.initial.kind = InitialCondition::Kind::random_band;
  else if (kind == "two_vortex") c.initial.kind = InitialCondition::Kind::two_vortex;
  else if (kind == "single_mode") c.initial.kind = InitialCondition::Kind::single_mode;
  else throw FormatError("manifest: unknown initial condition '" + kind + "'");
  c.initial.k_min = ic.at("k_min").get<int>();
  c.initial.k_max = ic.at("k_max").get<int>();
  c.initial.amplitude = ic.at("amplitude").get<double>();
  c.initial.seed = ic.at("seed").get<std::uint64_t>();
  c.initial.mode = ic.at("mode").get<std::vector<int>>();
  c.initial.vortex_width = ic.at("vortex_width").get<double>();
  return c;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string diagnostics_csv(const Trajectory& traj) {
  std::string out = "time,l2,linf,hhalf,umax,energy_residual\n";
  char buf[256];
  for (const auto& s : traj.scalars) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.time, s.l2, s.linf, s.hhalf, s.umax,
                  s.energy_residual);
    out += buf;
  }
  return out;
}

void write_trajectory(const std::filesystem::path& dir, const Trajectory& traj, const std::string& config_hash,
                      const std::string& extra_json) {
  std::filesystem::create_directories(dir);
  json snaps = json::array();
  for (const auto& s : traj.snapshots) {
    const auto name = snapshot_name(s.step);
    write_sqgf(dir / name, s.theta);
    snaps.push_back({{"step", s.step}, {"time", s.time}, {"file", name}});
  }
  json drift = json::array();
  if (traj.config.drift == DriftMode::prescribed) {
    for (std::size_t a = 0; a < traj.config.prescribed_velocity.size(); ++a) {
      const auto name = "drift_" + std::to_string(a) + ".sqgf";
      write_sqgf(dir / name, traj.config.prescribed_velocity[a]);
      drift.push_back(name);
    }
  }
  write_text(dir / "diagnostics.csv", diagnostics_csv(traj));

  json m = json::parse(extra_json);
  if (!m.is_object()) throw std::invalid_argument("extra manifest JSON must be an object");
  m["format"] = "sqglab-trajectory";
  m["library_version"] = version;
  m["config_hash"] = config_hash;
  m["solver"] = config_json(traj.config);
  m["snapshots"] = snaps;
  m["drift_files"] = drift;
  m["steps"] = traj.scalars.empty() ? 0 : traj.scalars.size() - 1;
  m["aborted"] = traj.aborted;
  m["abort_reason"] = traj.abort_reason;
  write_text(dir / "manifest.json", m.dump(2) + "\n");
}

Trajectory read_trajectory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw FormatError("trajectory directory not found: " + dir.string());
  json m;
  try {
    m = json::parse(read_text(dir / "manifest.json"));
  } catch (const json::exception& e) {
    throw FormatError(std::string("manifest.json: ") + e.what());
  }
  Trajectory traj;
  try {
    traj.config = config_from_json(m.at("solver"));
    for (const auto& name : m.at("drift_files")) traj.config.prescribed_velocity.push_back(read_sqgf(dir / name.get<std::string>()));
    for (const auto& s : m.at("snapshots")) {
      auto theta = read_sqgf(dir / s.at("file").get<std::string>());
      if (!(theta.grid == traj.config.grid)) throw FormatError("snapshot grid differs from manifest grid");
      const double t = s.at("time").get<double>();
      traj.snapshots.push_back(Snapshot{s.at("step").get<std::size_t>(), t, std::move(theta)});
    }
    traj.aborted = m.at("aborted").get<bool>();
    traj.abort_reason = m.at("abort_reason").get<std::string>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("manifest.json: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("manifest.json: ") + e.what());
  }
  if (traj.snapshots.empty()) throw FormatError("trajectory has no snapshots");
  for (std::size_t i = 1; i < traj.snapshots.size(); ++i) {
    if (!(traj.snapshots[i].time > traj.snapshots[i - 1].time)) throw FormatError("snapshot times are not increasing");
  }

  std::istringstream csv(read_text(dir / "diagnostics.csv"));
  std::string line;
  std::getline(csv, line);
  if (line != "time,l2,linf,hhalf,umax,energy_residual") throw FormatError("diagnostics.csv: unexpected header");
  std::size_t row = 1;
  while (std::getline(csv, line)) {
    ++row;
    if (line.empty()) continue;
    StepScalars s{};
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf", &s.time, &s.l2, &s.linf, &s.hhalf, &s.umax,
                    &s.energy_residual) != 6) {
      throw FormatError("diagnostics.csv: malformed row " + std::to_string(row));
    }
    traj.scalars.push_back(s);
  }
  return traj;
}

}  // namespace sqglab
