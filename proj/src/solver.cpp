#include "sqglab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "sqglab/fft.hpp"
#include "sqglab/spectral.hpp"

namespace sqglab {

namespace {

std::string cfl_message(double umax, double dt, double limit) {
  std::ostringstream os;
  os.precision(6);
  os << "CFL violated: max|u| = " << umax << ", dt = " << dt << " exceeds limit " << limit;
  return os.str();
}

std::string divergence_message(double residual, double tol) {
  std::ostringstream os;
  os << "drift is not divergence free: max|div v| = " << residual << " (tolerance " << tol << ")";
  return os.str();
}

std::size_t fft_index(int m, std::size_t n) {
  return m >= 0 ? static_cast<std::size_t>(m) : static_cast<std::size_t>(static_cast<long>(n) + m);
}

bool all_finite(const SpectralField& f) {
  return std::all_of(f.coeffs.begin(), f.coeffs.end(),
                     [](const std::complex<double>& c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); });
}

// First nonzero component positive: one representative of each +-m pair.
bool in_half_space(const std::array<int, 3>& m, std::size_t dim) {
  for (std::size_t a = 0; a < dim; ++a) {
    if (m[a] > 0) return true;
    if (m[a] < 0) return false;
  }
  return false;
}

PhysicalField random_band(const Grid& grid, const InitialCondition& ic) {
  if (ic.k_min < 1 || ic.k_max < ic.k_min) throw std::invalid_argument("random_band needs 1 <= k_min <= k_max");
  for (std::size_t a = 0; a < grid.dim(); ++a) {
    if (2 * static_cast<std::size_t>(ic.k_max) >= grid.size(a))
      throw std::invalid_argument("random_band: k_max is not resolved by the grid");
  }
  std::mt19937_64 rng(ic.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  SpectralField hat(grid);
  const int kx = ic.k_max;
  const int ky = grid.dim() > 1 ? kx : 0;
  const int kz = grid.dim() > 2 ? kx : 0;
  const double kmin2 = static_cast<double>(ic.k_min) * ic.k_min;
  const double kmax2 = static_cast<double>(ic.k_max) * ic.k_max;
  for (int i = -kx; i <= kx; ++i) {
    for (int j = -ky; j <= ky; ++j) {
      for (int l = -kz; l <= kz; ++l) {
        const std::array<int, 3> m{i, j, l};
        if (!in_half_space(m, grid.dim())) continue;
        const double r2 = static_cast<double>(i) * i + static_cast<double>(j) * j + static_cast<double>(l) * l;
        // Draw for every half-space wavevector in the box so the sequence does
        // not depend on which shell test passes.
        const double re = normal(rng);
        const double im = normal(rng);
        if (r2 < kmin2 || r2 > kmax2) continue;
        std::array<std::size_t, 3> pos{0, 0, 0}, neg{0, 0, 0};
        for (std::size_t a = 0; a < grid.dim(); ++a) {
          pos[a] = fft_index(m[a], grid.size(a));
          neg[a] = fft_index(-m[a], grid.size(a));
        }
        const std::complex<double> c(re, im);
        hat.coeffs[grid.flat(pos)] = c;
        hat.coeffs[grid.flat(neg)] = std::conj(c);
      }
    }
  }
  double power = 0.0;
  for (const auto& c : hat.coeffs) power += std::norm(c);
  if (power > 0.0) {
    const double scale = ic.amplitude / std::sqrt(power);
    for (auto& c : hat.coeffs) c *= scale;
  }
  return inverse(hat);
}

PhysicalField two_vortex(const Grid& grid, const InitialCondition& ic) {
  if (!(ic.vortex_width > 0.0)) throw std::invalid_argument("two_vortex: vortex_width must be positive");
  auto bump = [&](const std::array<double, 3>& x, double centre0) {
    double r2 = 0.0;
    for (std::size_t a = 0; a < grid.dim(); ++a) {
      const double len = grid.length(a);
      const double c = (a == 0 ? centre0 : 0.5) * len;
      double d = std::remainder(x[a] - c, len);
      const double w = ic.vortex_width * len;
      r2 += d * d / (w * w);
    }
    return std::exp(-0.5 * r2);
  };
  return sample(grid, [&](const std::array<double, 3>& x) { return ic.amplitude * (bump(x, 0.35) - bump(x, 0.65)); });
}

PhysicalField single_mode(const Grid& grid, const InitialCondition& ic) {
  if (ic.mode.size() != grid.dim()) throw std::invalid_argument("single_mode: mode needs one entry per axis");
  if (std::all_of(ic.mode.begin(), ic.mode.end(), [](int m) { return m == 0; }))
    throw std::invalid_argument("single_mode: mode must be nonzero");
  for (std::size_t a = 0; a < grid.dim(); ++a) {
    if (2 * static_cast<std::size_t>(std::abs(ic.mode[a])) >= grid.size(a))
      throw std::invalid_argument("single_mode: mode is not resolved by the grid");
  }
  return sample(grid, [&](const std::array<double, 3>& x) {
    double phase = 0.0;
    for (std::size_t a = 0; a < grid.dim(); ++a) phase += 2.0 * std::numbers::pi * ic.mode[a] * x[a] / grid.length(a);
    return ic.amplitude * std::sin(phase);
  });
}

std::vector<double> sqg_closure() { return {0.0, -1.0, 1.0, 0.0}; }

void check_closure(const std::vector<double>& c, std::size_t dim) {
  if (c.size() != dim * dim) throw std::invalid_argument("closure matrix must be N x N");
  for (std::size_t j = 0; j < dim; ++j) {
    for (std::size_t l = 0; l < dim; ++l) {
      if (std::abs(c[j * dim + l] + c[l * dim + j]) > 1e-14)
        throw std::invalid_argument("closure matrix must be antisymmetric for a divergence-free drift");
    }
  }
}

std::vector<SpectralField> closure_velocity_hat(const SpectralField& theta_hat, const std::vector<double>& c) {
  const std::size_t dim = theta_hat.grid.dim();
  std::vector<SpectralField> riesz;
  riesz.reserve(dim);
  for (std::size_t l = 0; l < dim; ++l) riesz.push_back(riesz_transform(theta_hat, l));
  std::vector<SpectralField> out;
  out.reserve(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    SpectralField u(theta_hat.grid);
    for (std::size_t l = 0; l < dim; ++l) {
      const double w = c[j * dim + l];
      if (w == 0.0) continue;
      for (std::size_t i = 0; i < u.coeffs.size(); ++i) u.coeffs[i] += w * riesz[l].coeffs[i];
    }
    out.push_back(std::move(u));
  }
  return out;
}

double divergence_tolerance(const VectorField& v) {
  const double scale = linf_norm(v) * v.front().grid.max_wavevector();
  return 1e-10 * std::max(1.0, scale);
}

void check_divergence_free(const VectorField& v) {
  const double residual = linf_norm(divergence(v));
  const double tol = divergence_tolerance(v);
  if (residual > tol) throw DivergenceError(residual, tol);
}

double max_speed_of(const VectorField& v) { return linf_norm(v); }

}  // namespace

CflViolation::CflViolation(double umax, double step, double lim)
    : std::runtime_error(cfl_message(umax, step, lim)), max_speed(umax), dt(step), limit(lim) {}

DivergenceError::DivergenceError(double r, double tol)
    : std::invalid_argument(divergence_message(r, tol)), residual(r) {}

PhysicalField make_initial_condition(const Grid& grid, const InitialCondition& ic) {
  if (!std::isfinite(ic.amplitude)) throw std::invalid_argument("initial amplitude must be finite");
  PhysicalField f(grid);
  switch (ic.kind) {
    case InitialCondition::Kind::random_band: f = random_band(grid, ic); break;
    case InitialCondition::Kind::two_vortex: f = two_vortex(grid, ic); break;
    case InitialCondition::Kind::single_mode: f = single_mode(grid, ic); break;
  }
  const double m = mean(f);
  for (auto& x : f.values) x -= m;
  return f;
}

void validate(const SolverConfig& c) {
  if (!(c.beta > 0.0 && c.beta <= 2.0)) throw std::invalid_argument("beta must lie in (0, 2]");
  if (!(c.kappa >= 0.0) || !std::isfinite(c.kappa)) throw std::invalid_argument("kappa must be finite and >= 0");
  if (c.dt && !(*c.dt > 0.0 && std::isfinite(*c.dt))) throw std::invalid_argument("dt must be positive");
  if (!(c.t_end >= 0.0) || !std::isfinite(c.t_end)) throw std::invalid_argument("t_end must be finite and >= 0");
  if (c.snapshot_stride == 0) throw std::invalid_argument("snapshot_stride must be >= 1");
  if (!(c.cfl > 0.0)) throw std::invalid_argument("cfl must be positive");
  if (c.dealias && c.initial.kind == InitialCondition::Kind::random_band) {
    for (std::size_t a = 0; a < c.grid.dim(); ++a) {
      if (3 * static_cast<std::size_t>(c.initial.k_max) > c.grid.size(a))
        throw std::invalid_argument("random_band: k_max exceeds the dealiased band n/3");
    }
  }
  switch (c.drift) {
    case DriftMode::sqg:
      if (c.closure.empty()) {
        if (c.grid.dim() != 2) throw std::invalid_argument("SQG drift requires a 2D grid");
      } else {
        check_closure(c.closure, c.grid.dim());
      }
      break;
    case DriftMode::prescribed:
      if (c.prescribed_velocity.size() != c.grid.dim())
        throw std::invalid_argument("prescribed drift needs one component per axis");
      for (const auto& comp : c.prescribed_velocity) {
        if (!(comp.grid == c.grid)) throw std::invalid_argument("prescribed drift grid differs from solver grid");
        require_finite(comp, "prescribed drift");
      }
      check_divergence_free(c.prescribed_velocity);
      break;
    case DriftMode::zero: break;
  }
}

VectorField velocity_from_theta(const PhysicalField& theta) {
  if (theta.grid.dim() != 2) throw std::invalid_argument("SQG velocity requires a 2D grid");
  return velocity_from_theta(theta, sqg_closure());
}

VectorField velocity_from_theta(const PhysicalField& theta, const std::vector<double>& closure) {
  check_closure(closure, theta.grid.dim());
  VectorField out;
  for (const auto& u : closure_velocity_hat(forward(theta), closure)) out.push_back(inverse(u));
  return out;
}

VectorField velocity_from_stream_function(const PhysicalField& psi) {
  if (psi.grid.dim() != 2) throw std::invalid_argument("stream function drift requires a 2D grid");
  const auto hat = forward(psi);
  auto u = inverse(derivative(hat, 1));
  for (auto& x : u.values) x = -x;
  return {std::move(u), inverse(derivative(hat, 0))};
}

PhysicalField rhs(const PhysicalField& theta, const VectorField& v, double beta, double kappa) {
  if (v.size() != theta.grid.dim()) throw std::invalid_argument("drift needs one component per axis");
  for (const auto& comp : v) {
    if (!(comp.grid == theta.grid)) throw std::invalid_argument("drift grid differs from theta grid");
  }
  if (!(kappa >= 0.0)) throw std::invalid_argument("kappa must be >= 0");
  check_divergence_free(v);
  const auto hat = forward(theta);
  PhysicalField product(theta.grid);
  for (std::size_t a = 0; a < v.size(); ++a) {
    const auto da = inverse(derivative(hat, a));
    for (std::size_t i = 0; i < product.size(); ++i) product[i] += v[a][i] * da[i];
  }
  auto transport = dealias(forward(product));
  const auto diss = fractional_laplacian(hat, beta);
  for (std::size_t i = 0; i < transport.coeffs.size(); ++i)
    transport.coeffs[i] = -transport.coeffs[i] - kappa * diss.coeffs[i];
  transport.coeffs[0] = 0.0;
  return inverse(transport);
}

Integrator::Integrator(SolverConfig config) : config_(std::move(config)), zero_(config_.grid) {
  validate(config_);
  if (config_.drift == DriftMode::sqg && config_.closure.empty()) config_.closure = sqg_closure();
  const auto& g = config_.grid;
  symbol_.assign(g.total(), 0.0);
  for_each_mode(g, [&](std::size_t flat, const std::array<double, 3>& k, const std::array<int, 3>&, const auto&) {
    const double mag = std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
    symbol_[flat] = mag == 0.0 ? 0.0 : config_.kappa * std::pow(mag, config_.beta);
  });
  if (config_.drift == DriftMode::prescribed) {
    for (const auto& comp : config_.prescribed_velocity) drift_hat_.push_back(forward(comp));
  }
}

VectorField Integrator::velocity(const SpectralField& theta_hat) const {
  const auto& g = config_.grid;
  switch (config_.drift) {
    case DriftMode::sqg: {
      VectorField out;
      for (const auto& u : closure_velocity_hat(theta_hat, config_.closure)) out.push_back(inverse(u));
      return out;
    }
    case DriftMode::prescribed: return config_.prescribed_velocity;
    case DriftMode::zero: break;
  }
  return VectorField(g.dim(), PhysicalField(g));
}

double Integrator::max_speed(const SpectralField& theta_hat) const {
  if (config_.drift == DriftMode::zero) return 0.0;
  return max_speed_of(velocity(theta_hat));
}

SpectralField Integrator::nonlinear(const SpectralField& theta_hat) const {
  if (config_.drift == DriftMode::zero) return zero_;
  const auto& g = config_.grid;
  const auto v = velocity(theta_hat);
  PhysicalField product(g);
  for (std::size_t a = 0; a < g.dim(); ++a) {
    const auto da = inverse(derivative(theta_hat, a));
    const auto& va = v[a].values;
    for (std::size_t i = 0; i < product.size(); ++i) product[i] += va[i] * da[i];
  }
  auto out = forward(product);
  if (config_.dealias) out = dealias(out);
  for (auto& c : out.coeffs) c = -c;
  out.coeffs[0] = 0.0;
  return out;
}

SpectralField Integrator::advance(const SpectralField& theta_hat, double dt, const SpectralField* n0) const {
  const std::size_t total = config_.grid.total();
  std::vector<double> full(total), half(total);
  for (std::size_t i = 0; i < total; ++i) {
    full[i] = std::exp(-symbol_[i] * dt);
    half[i] = std::exp(-0.5 * symbol_[i] * dt);
  }
  const SpectralField a = n0 ? *n0 : nonlinear(theta_hat);

  SpectralField stage(config_.grid);
  for (std::size_t i = 0; i < total; ++i) stage.coeffs[i] = half[i] * (theta_hat.coeffs[i] + 0.5 * dt * a.coeffs[i]);
  const SpectralField b = nonlinear(stage);

  for (std::size_t i = 0; i < total; ++i) stage.coeffs[i] = half[i] * theta_hat.coeffs[i] + 0.5 * dt * b.coeffs[i];
  const SpectralField c = nonlinear(stage);

  for (std::size_t i = 0; i < total; ++i) stage.coeffs[i] = full[i] * theta_hat.coeffs[i] + dt * half[i] * c.coeffs[i];
  const SpectralField d = nonlinear(stage);

  SpectralField out(config_.grid);
  for (std::size_t i = 0; i < total; ++i) {
    out.coeffs[i] = full[i] * theta_hat.coeffs[i] +
                    dt / 6.0 * (full[i] * a.coeffs[i] + 2.0 * half[i] * (b.coeffs[i] + c.coeffs[i]) + d.coeffs[i]);
  }
  return out;
}

double Integrator::cfl_limit(double umax) const {
  if (!(umax > 0.0)) return std::numeric_limits<double>::infinity();
  return config_.cfl * config_.grid.min_spacing() / umax;
}

double Integrator::auto_dt(double umax) const {
  double dt = cfl_limit(umax);
  if (config_.kappa > 0.0) dt = std::min(dt, std::pow(config_.grid.min_spacing(), config_.beta) / config_.kappa);
  return dt;
}

State step(const Integrator& integrator, const State& state, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive and finite");
  const double umax = integrator.max_speed(state.theta_hat);
  const double limit = integrator.cfl_limit(umax);
  if (dt > limit * (1.0 + 1e-12)) throw CflViolation(umax, dt, limit);
  return State{integrator.advance(state.theta_hat, dt), state.time + dt, state.step + 1};
}

VectorField Trajectory::velocity_at(std::size_t i) const {
  const auto& theta = snapshots.at(i).theta;
  switch (config.drift) {
    case DriftMode::sqg:
      return config.closure.empty() ? velocity_from_theta(theta) : velocity_from_theta(theta, config.closure);
    case DriftMode::prescribed: return config.prescribed_velocity;
    case DriftMode::zero: break;
  }
  return VectorField(theta.grid.dim(), PhysicalField(theta.grid));
}

std::size_t Trajectory::snapshot_at(double t) const {
  if (snapshots.empty()) throw std::invalid_argument("empty trajectory");
  const double tol = 1e-9 * std::max(1.0, std::abs(t));
  if (t > t_final() + tol || t < t_begin() - tol) throw std::invalid_argument("time lies outside the trajectory");
  for (std::size_t i = 0; i < snapshots.size(); ++i) {
    if (std::abs(snapshots[i].time - t) <= tol) return i;
  }
  throw std::invalid_argument("no snapshot at the requested time");
}

namespace {

// d/dt of the dissipation seminorm ||Lambda^{beta/2} theta||^2 given theta_t.
double dissipation_rate(const SpectralField& theta_hat, const SpectralField& theta_t, const std::vector<double>& kpow) {
  double acc = 0.0;
  for (std::size_t i = 0; i < kpow.size(); ++i) acc += kpow[i] * std::real(std::conj(theta_hat.coeffs[i]) * theta_t.coeffs[i]);
  return 2.0 * theta_hat.grid.volume() * acc;
}

bool finite_scalars(const StepScalars& s) {
  return std::isfinite(s.l2) && std::isfinite(s.linf) && std::isfinite(s.hhalf) && std::isfinite(s.umax) &&
         std::isfinite(s.energy_residual);
}

}  // namespace

Trajectory run(const SolverConfig& config) {
  Integrator integ(config);
  const auto& g = config.grid;
  const double beta = config.beta;
  const double kappa = config.kappa;

  std::vector<double> kpow(g.total(), 0.0);
  for_each_mode(g, [&](std::size_t flat, const std::array<double, 3>& k, const std::array<int, 3>&, const auto&) {
    const double mag = std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
    kpow[flat] = mag == 0.0 ? 0.0 : std::pow(mag, beta);
  });
  const auto& symbol = integ.linear_symbol();
  auto time_derivative = [&](const SpectralField& th, const SpectralField& n) {
    SpectralField out(g);
    for (std::size_t i = 0; i < out.coeffs.size(); ++i) out.coeffs[i] = n.coeffs[i] - symbol[i] * th.coeffs[i];
    return out;
  };

  Trajectory traj;
  traj.config = config;

  SpectralField theta_hat = forward(make_initial_condition(g, config.initial));
  if (config.dealias) theta_hat = dealias(theta_hat);
  SpectralField n_cur(g);
  try {
    n_cur = integ.nonlinear(theta_hat);
  } catch (const std::invalid_argument&) {
    traj.aborted = true;
    traj.abort_reason = "non-finite transport term in the initial state";
  }

  const double energy0 = l2_norm_sq(theta_hat);
  double dissipated = 0.0;
  double diss_cur = sobolev_seminorm_sq(theta_hat, 0.5 * beta);
  double rate_cur = dissipation_rate(theta_hat, time_derivative(theta_hat, n_cur), kpow);

  auto record = [&](const SpectralField& th, const PhysicalField& phys, double t, double umax) {
    traj.scalars.push_back(StepScalars{t, std::sqrt(l2_norm_sq(th)), linf_norm(phys), h_half_seminorm(th), umax,
                                       l2_norm_sq(th) - energy0 + 2.0 * kappa * dissipated});
  };

  double t = 0.0;
  std::size_t n = 0;
  {
    PhysicalField phys = inverse(theta_hat);
    phys.time_tag = 0.0;
    record(theta_hat, phys, 0.0, integ.max_speed(theta_hat));
    traj.snapshots.push_back(Snapshot{0, 0.0, std::move(phys)});
    if (!finite_scalars(traj.scalars.back())) {
      traj.aborted = true;
      traj.abort_reason = "non-finite diagnostics in the initial state";
    }
    if (traj.aborted) return traj;
  }

  const double t_end = config.t_end;
  const double slack = 1e-12 * std::max(1.0, t_end);
  while (t < t_end - slack) {
    if (n >= config.max_steps) throw std::runtime_error("run exceeded max_steps before reaching t_end");
    const double umax = traj.scalars.back().umax;
    double h = config.dt ? *config.dt : integ.auto_dt(umax);
    if (config.dt) {
      const double limit = integ.cfl_limit(umax);
      if (h > limit * (1.0 + 1e-12)) throw CflViolation(umax, h, limit);
    }
    if (!std::isfinite(h)) h = t_end - t;
    if (t + h > t_end - slack) h = t_end - t;

    SpectralField next(g);
    SpectralField n_next(g);
    bool finite = true;
    try {
      next = integ.advance(theta_hat, h, &n_cur);
      finite = all_finite(next);
      if (finite) n_next = integ.nonlinear(next);
    } catch (const std::invalid_argument&) {
      finite = false;
    }
    if (!finite) {
      traj.aborted = true;
      std::ostringstream os;
      os << "non-finite state at step " << n + 1 << ", t = " << t + h;
      traj.abort_reason = os.str();
      break;
    }

    const double diss_next = sobolev_seminorm_sq(next, 0.5 * beta);
    const double rate_next = dissipation_rate(next, time_derivative(next, n_next), kpow);
    // Endpoint-corrected trapezoid, fourth order in h.
    dissipated += 0.5 * h * (diss_cur + diss_next) + h * h / 12.0 * (rate_cur - rate_next);

    theta_hat = std::move(next);
    n_cur = std::move(n_next);
    diss_cur = diss_next;
    rate_cur = rate_next;
    t = (t + h >= t_end - slack) ? t_end : t + h;
    ++n;

    PhysicalField phys = inverse(theta_hat);
    const double speed = integ.max_speed(theta_hat);
    record(theta_hat, phys, t, speed);
    if (!finite_scalars(traj.scalars.back())) {
      traj.scalars.pop_back();
      traj.aborted = true;
      traj.abort_reason = "non-finite diagnostics at t = " + std::to_string(t);
      break;
    }
    const bool last = t >= t_end - slack;
    if (n % config.snapshot_stride == 0 || last) {
      phys.time_tag = t;
      traj.snapshots.push_back(Snapshot{n, t, std::move(phys)});
    }
  }
  return traj;
}

double duhamel_residual(const Trajectory& traj, double t, std::size_t stride) {
  if (stride == 0) throw std::invalid_argument("stride must be >= 1");
  const std::size_t target = traj.snapshot_at(t);
  if (target == 0) return 0.0;

  Integrator integ(traj.config);
  const auto& g = traj.config.grid;
  const auto& symbol = integ.linear_symbol();

  std::vector<std::size_t> nodes;
  for (std::size_t i = 0; i < target; i += stride) nodes.push_back(i);
  nodes.push_back(target);

  const double t0 = traj.snapshots[nodes.front()].time;
  const double t1 = traj.snapshots[target].time;
  const auto theta0 = forward(traj.snapshots[nodes.front()].theta);

  SpectralField rep(g);
  for (std::size_t i = 0; i < rep.coeffs.size(); ++i) rep.coeffs[i] = std::exp(-symbol[i] * (t1 - t0)) * theta0.coeffs[i];

  SpectralField n_a = integ.nonlinear(theta0);
  for (std::size_t s = 1; s < nodes.size(); ++s) {
    const double sa = traj.snapshots[nodes[s - 1]].time;
    const double sb = traj.snapshots[nodes[s]].time;
    const double tau = sb - sa;
    const auto n_b = integ.nonlinear(forward(traj.snapshots[nodes[s]].theta));
    for (std::size_t i = 0; i < rep.coeffs.size(); ++i) {
      const double x = symbol[i] * tau;
      double wa, wb;
      if (x < 1e-4) {
        wa = tau * (0.5 - x / 3.0 + x * x / 8.0 - x * x * x / 30.0);
        wb = tau * (0.5 - x / 6.0 + x * x / 24.0 - x * x * x / 120.0);
      } else {
        const double ex = std::exp(-x);
        wb = tau * (x - 1.0 + ex) / (x * x);
        wa = tau * (1.0 - ex) / x - wb;
      }
      const double decay = std::exp(-symbol[i] * (t1 - sb));
      rep.coeffs[i] += decay * (wa * n_a.coeffs[i] + wb * n_b.coeffs[i]);
    }
    n_a = n_b;
  }
  const auto approx = inverse(rep);
  const auto& exact = traj.snapshots[target].theta;
  double worst = 0.0;
  for (std::size_t i = 0; i < approx.size(); ++i) worst = std::max(worst, std::abs(exact[i] - approx[i]));
  return worst;
}

}  // namespace sqglab
