#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "sqglab/trajectory_io.hpp"

namespace sqglab::cli {

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"", {"version"}},
      {"grid", {"dims", "lengths"}},
      {"solver",
       {"beta", "kappa", "dt", "t_end", "drift", "velocity", "closure", "dealias", "snapshot_stride", "cfl",
        "max_steps"}},
      {"initial", {"kind", "k_min", "k_max", "amplitude", "seed", "mode", "vortex_width"}},
      {"diagnostics",
       {"checks", "levels", "t1", "t2", "refine", "uk_t0", "uk_cap", "uk_levels", "decay_t_min", "decay_t_max",
        "cordoba_fields", "cordoba_seed", "cordoba_refine", "local_radius", "local_z_count", "duhamel_stride"}},
      {"lemmas",
       {"dim", "b1_resolution", "b2_p_max", "b2_h", "b2_boundary_value", "corpus_size", "corpus_seed",
        "iso_resolution", "energy_constant"}},
      {"galerkin",
       {"dim", "modes", "quadrature", "epsilon", "dt", "t_end", "stream_modes", "stream_amplitude", "seed",
        "levels"}},
      {"holder", {"t", "radius_max", "radii", "frame", "frame_radius"}},
  };
  return s;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string qualified(const std::string& section, const std::string& key) {
  return section.empty() ? key : section + "." + key;
}

}  // namespace

ConfigError::ConfigError(const std::string& source, std::size_t line, const std::string& what)
    : std::runtime_error(source + (line ? ":" + std::to_string(line) : std::string()) + ": " + what), line(line) {}

ExperimentConfig ExperimentConfig::parse(std::string_view text, std::string source) {
  ExperimentConfig cfg;
  cfg.source_ = std::move(source);
  std::string section;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    const auto hash = raw.find_first_of("#;");
    const std::string line = trim(std::string_view(raw).substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(cfg.source_, line_no, "unterminated section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (section.empty() || !schema().count(section)) {
        throw ConfigError(cfg.source_, line_no, "unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(cfg.source_, line_no, "expected 'key = value'");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw ConfigError(cfg.source_, line_no, "empty key");
    if (!schema().at(section).count(key)) {
      throw ConfigError(cfg.source_, line_no, "unknown key '" + qualified(section, key) + "'");
    }
    if (value.empty()) throw ConfigError(cfg.source_, line_no, "empty value for '" + qualified(section, key) + "'");
    auto& slot = cfg.entries_[section];
    if (slot.count(key)) throw ConfigError(cfg.source_, line_no, "duplicate key '" + qualified(section, key) + "'");
    slot[key] = Entry{value, line_no};
  }
  const auto* v = cfg.find("", "version");
  if (!v) throw ConfigError(cfg.source_, 0, "missing required key 'version'");
  if (v->value != std::to_string(supported_version)) {
    throw ConfigError(cfg.source_, v->line,
                      "unsupported version '" + v->value + "' (expected " + std::to_string(supported_version) + ")");
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), 0, "cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

const ExperimentConfig::Entry* ExperimentConfig::find(const std::string& section, const std::string& key) const {
  const auto s = entries_.find(section);
  if (s == entries_.end()) return nullptr;
  const auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

bool ExperimentConfig::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

const std::string& ExperimentConfig::require(const std::string& section, const std::string& key) const {
  const auto* e = find(section, key);
  if (!e) throw ConfigError(source_, 0, "missing required key '" + qualified(section, key) + "'");
  return e->value;
}

void ExperimentConfig::reject(const std::string& section, const std::string& key, const std::string& why) const {
  const auto* e = find(section, key);
  throw ConfigError(source_, e ? e->line : 0, "'" + qualified(section, key) + "' " + why);
}

std::string ExperimentConfig::get_string(const std::string& section, const std::string& key,
                                         const std::string& fallback) const {
  const auto* e = find(section, key);
  return e ? e->value : fallback;
}

namespace {

template <class T>
std::optional<T> parse_number(const std::string& s) {
  T out{};
  const auto* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, out);
  if (r.ec != std::errc() || r.ptr != end) return std::nullopt;
  return out;
}

}  // namespace

double ExperimentConfig::get_double(const std::string& section, const std::string& key, double fallback) const {
  if (!has(section, key)) return fallback;
  return require_double(section, key);
}

double ExperimentConfig::require_double(const std::string& section, const std::string& key) const {
  const auto v = parse_number<double>(require(section, key));
  if (!v || !std::isfinite(*v)) reject(section, key, "must be a finite number");
  return *v;
}

long long ExperimentConfig::get_int(const std::string& section, const std::string& key, long long fallback) const {
  if (!has(section, key)) return fallback;
  const auto v = parse_number<long long>(require(section, key));
  if (!v) reject(section, key, "must be an integer");
  return *v;
}

std::uint64_t ExperimentConfig::require_seed(const std::string& section, const std::string& key) const {
  const auto v = parse_number<std::uint64_t>(require(section, key));
  if (!v) reject(section, key, "must be a non-negative integer");
  return *v;
}

bool ExperimentConfig::get_bool(const std::string& section, const std::string& key, bool fallback) const {
  if (!has(section, key)) return fallback;
  const auto& v = require(section, key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  reject(section, key, "must be true or false");
}

std::vector<std::string> ExperimentConfig::get_words(const std::string& section, const std::string& key) const {
  std::vector<std::string> out;
  if (!has(section, key)) return out;
  std::string s = require(section, key);
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream in(s);
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

std::vector<double> ExperimentConfig::get_doubles(const std::string& section, const std::string& key) const {
  std::vector<double> out;
  for (const auto& w : get_words(section, key)) {
    const auto v = parse_number<double>(w);
    if (!v || !std::isfinite(*v)) reject(section, key, "must be a list of finite numbers");
    out.push_back(*v);
  }
  return out;
}

void ExperimentConfig::override_seeds(std::uint64_t seed) {
  const std::string s = std::to_string(seed);
  for (auto& [section, keys] : entries_) {
    for (auto& [key, entry] : keys) {
      if (key.find("seed") != std::string::npos) entry.value = s;
    }
  }
  auto& init = entries_["initial"]["seed"];
  init.value = s;
}

std::string ExperimentConfig::canonical() const {
  std::ostringstream out;
  for (const auto& [section, keys] : entries_) {
    if (keys.empty()) continue;
    if (!section.empty()) out << "[" << section << "]\n";
    for (const auto& [key, entry] : keys) out << key << " = " << entry.value << "\n";
  }
  return out.str();
}

std::string ExperimentConfig::hash() const { return fnv1a_hex(canonical()); }

SolverConfig solver_config(const ExperimentConfig& cfg) {
  SolverConfig c;
  std::vector<std::size_t> dims;
  for (double d : cfg.get_doubles("grid", "dims")) {
    if (d < 1 || d != std::floor(d)) cfg.reject("grid", "dims", "must be positive integers");
    dims.push_back(static_cast<std::size_t>(d));
  }
  if (dims.empty()) cfg.require("grid", "dims");
  try {
    c.grid = Grid(dims, cfg.get_doubles("grid", "lengths"));
  } catch (const std::invalid_argument& e) {
    cfg.reject("grid", cfg.has("grid", "lengths") ? "lengths" : "dims", e.what());
  }
  c.beta = cfg.get_double("solver", "beta", c.beta);
  c.kappa = cfg.get_double("solver", "kappa", c.kappa);
  c.t_end = cfg.require_double("solver", "t_end");
  const std::string dt = cfg.get_string("solver", "dt", "auto");
  if (dt != "auto") c.dt = cfg.require_double("solver", "dt");
  const std::string drift = cfg.get_string("solver", "drift", "sqg");
  if (drift == "sqg") {
    c.drift = DriftMode::sqg;
  } else if (drift == "zero") {
    c.drift = DriftMode::zero;
  } else if (drift == "uniform") {
    // A constant vector field; the only steady drift that needs no extra input file.
    const auto v = cfg.get_doubles("solver", "velocity");
    if (v.size() != c.grid.dim()) cfg.reject("solver", "velocity", "needs one entry per axis");
    c.drift = DriftMode::prescribed;
    for (double comp : v) c.prescribed_velocity.emplace_back(c.grid, std::vector<double>(c.grid.total(), comp));
  } else {
    cfg.reject("solver", "drift", "must be sqg, zero or uniform");
  }
  c.closure = cfg.get_doubles("solver", "closure");
  c.dealias = cfg.get_bool("solver", "dealias", c.dealias);
  c.snapshot_stride = static_cast<std::size_t>(cfg.get_int("solver", "snapshot_stride", 1));
  c.cfl = cfg.get_double("solver", "cfl", c.cfl);
  c.max_steps = static_cast<std::size_t>(cfg.get_int("solver", "max_steps", static_cast<long long>(c.max_steps)));

  auto& ic = c.initial;
  const std::string kind = cfg.get_string("initial", "kind", "random_band");
  if (kind == "random_band") {
    ic.kind = InitialCondition::Kind::random_band;
    ic.seed = cfg.require_seed("initial", "seed");
  } else if (kind == "two_vortex") {
    ic.kind = InitialCondition::Kind::two_vortex;
  } else if (kind == "single_mode") {
    ic.kind = InitialCondition::Kind::single_mode;
    for (double m : cfg.get_doubles("initial", "mode")) ic.mode.push_back(static_cast<int>(m));
  } else {
    cfg.reject("initial", "kind", "must be random_band, two_vortex or single_mode");
  }
  ic.k_min = static_cast<int>(cfg.get_int("initial", "k_min", ic.k_min));
  std::size_t smallest = c.grid.size(0);
  for (std::size_t a = 1; a < c.grid.dim(); ++a) smallest = std::min(smallest, c.grid.size(a));
  const int band = static_cast<int>(smallest / 3);
  ic.k_max = static_cast<int>(cfg.get_int("initial", "k_max", std::min(ic.k_max, band)));
  ic.amplitude = cfg.get_double("initial", "amplitude", ic.amplitude);
  ic.vortex_width = cfg.get_double("initial", "vortex_width", ic.vortex_width);

  try {
    validate(c);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(cfg.source(), 0, e.what());
  }
  return c;
}

}  // namespace sqglab::cli
