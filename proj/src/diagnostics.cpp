#include "sqglab/diagnostics.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sqglab/extension.hpp"
#include "sqglab/fft.hpp"
#include "sqglab/spectral.hpp"

namespace sqglab {

const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass:
      return "pass";
    case CheckStatus::fail:
      return "fail";
    case CheckStatus::inconclusive:
      return "inconclusive";
  }
  return "unknown";
}

bool DiagnosticsReport::any_failed() const {
  return std::any_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.status == CheckStatus::fail; });
}

namespace {

nlohmann::json number(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

}  // namespace

std::string DiagnosticsReport::to_json() const {
  nlohmann::json out = nlohmann::json::object();
  auto list = nlohmann::json::array();
  for (const auto& c : checks) {
    nlohmann::json j;
    j["name"] = c.name;
    j["property"] = c.property;
    j["status"] = to_string(c.status);
    j["residual"] = number(c.residual);
    j["tolerance"] = number(c.tolerance);
    j["inputs"] = c.inputs;
    j["note"] = c.note;
    nlohmann::json vals = nlohmann::json::object();
    for (const auto& [k, v] : c.values) vals[k] = number(v);
    j["values"] = vals;
    list.push_back(std::move(j));
  }
  out["checks"] = std::move(list);
  out["failed"] = any_failed();
  return out.dump(2);
}

PhysicalField truncate(const PhysicalField& theta, double level) {
  PhysicalField out(theta.grid);
  for (std::size_t i = 0; i < theta.size(); ++i) out.values[i] = std::max(theta.values[i] - level, 0.0);
  out.time_tag = theta.time_tag;
  return out;
}

std::vector<double> spanning_levels(const PhysicalField& theta, std::size_t count) {
  if (count == 0) return {};
  const auto [lo, hi] = std::minmax_element(theta.values.begin(), theta.values.end());
  if (count == 1) return {0.5 * (*lo + *hi)};
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = *lo + (*hi - *lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return out;
}

namespace {

// theta and d theta/dt on the refined grid at one snapshot.
struct RefinedState {
  double time;
  PhysicalField theta;
  PhysicalField theta_t;
};

RefinedState refined_state(const Integrator& integ, const Snapshot& snap, std::size_t refine) {
  const auto hat = forward(snap.theta);
  SpectralField rate = integ.nonlinear(hat);
  const auto& symbol = integ.linear_symbol();
  for (std::size_t i = 0; i < rate.coeffs.size(); ++i) rate.coeffs[i] -= symbol[i] * hat.coeffs[i];
  const Grid fine = snap.theta.grid.refined(refine);
  return RefinedState{snap.time, inverse(resample(hat, fine)), inverse(resample(rate, fine))};
}

// Per-level energy E = int gamma^2, dissipation D = kappa ||Lambda^{beta/2} gamma||^2 and dD/dt.
struct LevelSample {
  double energy;
  double dissipation;
  double rate;
};

LevelSample level_sample(const RefinedState& s, double level, double beta, double kappa) {
  const Grid& g = s.theta.grid;
  PhysicalField gamma(g), gamma_t(g);
  bool any = false;
  for (std::size_t i = 0; i < g.total(); ++i) {
    if (s.theta.values[i] > level) {
      gamma.values[i] = s.theta.values[i] - level;
      gamma_t.values[i] = s.theta_t.values[i];
      any = true;
    }
  }
  if (!any) return {0.0, 0.0, 0.0};
  const auto gh = forward(gamma);
  const auto gth = forward(gamma_t);
  double d = 0.0, r = 0.0;
  for_each_mode(g, [&](std::size_t f, const std::array<double, 3>& k, const std::array<int, 3>&,
                       const std::array<std::size_t, 3>&) {
    const double kk = std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
    if (kk == 0.0) return;
    const double w = std::pow(kk, beta);
    d += w * std::norm(gh.coeffs[f]);
    r += w * std::real(std::conj(gh.coeffs[f]) * gth.coeffs[f]);
  });
  const double vol = g.volume();
  return {l2_norm_sq(gamma), kappa * vol * d, 2.0 * kappa * vol * r};
}

std::pair<std::size_t, std::size_t> window(const Trajectory& traj, double t1, double t2) {
  if (!(t1 < t2)) throw std::invalid_argument("level-set window needs t1 < t2");
  return {traj.snapshot_at(t1), traj.snapshot_at(t2)};
}

LevelSetResult scalar_energy_law(const Trajectory& traj, std::size_t i1, std::size_t i2, double tol) {
  const auto& a = traj.scalars.at(traj.snapshots[i1].step);
  const auto& b = traj.scalars.at(traj.snapshots[i2].step);
  LevelSetResult r{};
  r.level = -std::numeric_limits<double>::infinity();
  r.rhs = a.l2 * a.l2;
  r.residual = b.energy_residual - a.energy_residual;
  r.lhs = r.rhs + r.residual;
  r.tolerance = tol;
  r.quadrature_estimate = 0.0;
  r.status = r.residual <= tol ? CheckStatus::pass : CheckStatus::fail;
  return r;
}

}  // namespace

std::vector<LevelSetResult> level_set_sweep(const Trajectory& traj, const std::vector<double>& levels, double t1,
                                            double t2, const LevelSetOptions& opt) {
  const auto [i1, i2] = window(traj, t1, t2);
  const double tol = opt.relative_tolerance * l2_norm_sq(traj.initial());
  const std::size_t count = i2 - i1 + 1;

  std::vector<LevelSetResult> out(levels.size());
  std::vector<std::size_t> finite;
  for (std::size_t l = 0; l < levels.size(); ++l) {
    if (std::isinf(levels[l]) && levels[l] < 0) {
      out[l] = scalar_energy_law(traj, i1, i2, tol);
    } else {
      finite.push_back(l);
    }
  }
  if (finite.empty()) return out;
  if (count < 3) {
    for (auto l : finite) {
      out[l] = LevelSetResult{levels[l], 0, 0, 0, tol, 0, CheckStatus::inconclusive};
    }
    return out;
  }

  Integrator integ(traj.config);
  const double beta = traj.config.beta, kappa = traj.config.kappa;
  std::vector<LevelSample> prev(finite.size()), first(finite.size());
  std::vector<double> hermite(finite.size(), 0.0), trap(finite.size(), 0.0);
  double t_prev = 0.0;
  for (std::size_t i = i1; i <= i2; ++i) {
    const auto st = refined_state(integ, traj.snapshots[i], opt.refine);
    for (std::size_t j = 0; j < finite.size(); ++j) {
      const auto cur = level_sample(st, levels[finite[j]], beta, kappa);
      if (i == i1) {
        first[j] = cur;
      } else {
        const double h = st.time - t_prev;
        const double tr = 0.5 * h * (prev[j].dissipation + cur.dissipation);
        trap[j] += tr;
        hermite[j] += tr + h * h / 12.0 * (prev[j].rate - cur.rate);
      }
      prev[j] = cur;
    }
    t_prev = st.time;
  }
  for (std::size_t j = 0; j < finite.size(); ++j) {
    LevelSetResult r{};
    r.level = levels[finite[j]];
    r.rhs = first[j].energy;
    r.lhs = prev[j].energy + 2.0 * hermite[j];
    r.residual = r.lhs - r.rhs;
    r.tolerance = tol;
    r.quadrature_estimate = 2.0 * std::abs(hermite[j] - trap[j]);
    if (r.residual <= tol) {
      r.status = CheckStatus::pass;
    } else {
      // A quadrature error comparable to the excess means the snapshots are too sparse to decide.
      r.status = r.quadrature_estimate >= r.residual ? CheckStatus::inconclusive : CheckStatus::fail;
    }
    out[finite[j]] = r;
  }
  return out;
}

LevelSetResult level_set_energy_check(const Trajectory& traj, double level, double t1, double t2,
                                      const LevelSetOptions& opt) {
  return level_set_sweep(traj, {level}, t1, t2, opt).front();
}

LevelSetLedger uk_sequence(const Trajectory& traj, double cap, double t0, std::size_t levels, std::size_t refine) {
  if (!(cap > 0.0) || !std::isfinite(cap)) throw std::invalid_argument("cap M must be positive and finite");
  if (!(t0 > 0.0) || t0 >= traj.t_final()) throw std::invalid_argument("t0 must lie inside (0, t_end)");
  if (traj.t_begin() != 0.0) throw std::invalid_argument("trajectory must start at t = 0");

  const std::size_t dim = traj.config.grid.dim();
  LevelSetLedger led{};
  led.cap = cap;
  led.t0 = t0;
  led.dim = dim;
  led.initial_energy = l2_norm_sq(traj.initial());
  for (std::size_t k = 0; k <= levels; ++k) {
    const double f = 1.0 - std::ldexp(1.0, -static_cast<int>(k));
    led.levels.push_back(cap * f);
    led.times.push_back(t0 * f);
  }
  const std::size_t nl = led.levels.size();
  const std::size_t ns = traj.snapshots.size();

  Integrator integ(traj.config);
  const double beta = traj.config.beta, kappa = traj.config.kappa;
  // samples[s][k]
  std::vector<std::vector<LevelSample>> samples(ns, std::vector<LevelSample>(nl));
  // Chebyshev integrands on the native grid: |{theta_k > 0}| and int (2^k theta_{k-1} / M)^{2/N}.
  std::vector<std::vector<double>> measure(ns, std::vector<double>(nl, 0.0));
  std::vector<std::vector<double>> bound(ns, std::vector<double>(nl, 0.0));
  const double expo = 2.0 / static_cast<double>(dim);
  for (std::size_t s = 0; s < ns; ++s) {
    const auto st = refined_state(integ, traj.snapshots[s], refine);
    for (std::size_t k = 0; k < nl; ++k) samples[s][k] = level_sample(st, led.levels[k], beta, kappa);
    const auto& th = traj.snapshots[s].theta;
    const double cell = th.grid.cell_volume();
    for (std::size_t k = 1; k < nl; ++k) {
      const double scale = std::ldexp(1.0, static_cast<int>(k)) / cap;
      double mlhs = 0.0, mrhs = 0.0;
      for (double v : th.values) {
        if (v > led.levels[k]) mlhs += cell;
        const double prev = std::max(v - led.levels[k - 1], 0.0);
        if (prev > 0.0) mrhs += cell * std::pow(scale * prev, expo);
      }
      measure[s][k] = mlhs;
      bound[s][k] = mrhs;
    }
  }

  // Integral of a per-snapshot quantity from `from` to the last snapshot; the
  // partial first interval uses linear interpolation.
  auto tail_integral = [&](double from, auto&& value) {
    double total = 0.0;
    for (std::size_t s = 0; s + 1 < ns; ++s) {
      const double ta = traj.snapshots[s].time, tb = traj.snapshots[s + 1].time;
      if (tb <= from) continue;
      const double va = value(s), vb = value(s + 1);
      if (ta >= from) {
        total += 0.5 * (tb - ta) * (va + vb);
      } else {
        const double w = (from - ta) / (tb - ta);
        const double vf = va + w * (vb - va);
        total += 0.5 * (tb - from) * (vf + vb);
      }
    }
    return total;
  };

  for (std::size_t k = 0; k < nl; ++k) {
    double sup = 0.0;
    for (std::size_t s = 0; s < ns; ++s) {
      if (traj.snapshots[s].time >= led.times[k] - 1e-12 * t0) sup = std::max(sup, samples[s][k].energy);
    }
    const double diss = tail_integral(led.times[k], [&](std::size_t s) { return samples[s][k].dissipation; });
    led.energies.push_back(sup + 2.0 * diss);
    led.energies_upper.push_back(led.energies.back() + samples[ns - 1][k].energy);
    if (k == 0) {
      led.chebyshev_lhs.push_back(0.0);
      led.chebyshev_rhs.push_back(0.0);
    } else {
      led.chebyshev_lhs.push_back(tail_integral(led.times[k - 1], [&](std::size_t s) { return measure[s][k]; }));
      led.chebyshev_rhs.push_back(tail_integral(led.times[k - 1], [&](std::size_t s) { return bound[s][k]; }));
    }
  }
  return led;
}

RecursionReport uk_recursion_check(const LevelSetLedger& led, std::size_t max_level) {
  const std::size_t last = led.energies.empty() ? 0 : led.energies.size() - 1;
  if (last < 3) throw std::invalid_argument("recursion check needs at least three levels beyond k = 0");
  const std::size_t kmax = max_level == 0 ? last : std::min(max_level, last);
  const double n = static_cast<double>(led.dim);
  const auto& u = led.energies;

  RecursionReport rep{};
  rep.monotone = true;
  rep.geometric_decay = true;
  rep.chebyshev_ok = true;
  rep.checked_levels = kmax;
  const double slack = 1e-9 * std::max(u[0], std::numeric_limits<double>::min());
  double c = 0.0;
  for (std::size_t k = 1; k <= kmax; ++k) {
    if (u[k] > u[k - 1] + slack) rep.monotone = false;
    if (u[k] > 0.5 * u[k - 1]) rep.geometric_decay = false;
    if (led.chebyshev_lhs[k] > led.chebyshev_rhs[k] * (1.0 + 1e-12)) rep.chebyshev_ok = false;
    if (u[k - 1] <= 0.0) {
      if (u[k] > 0.0) rep.implication_violated = true;
      continue;
    }
    const double denom = std::pow(2.0, (n + 2.0) * static_cast<double>(k) / n) * std::pow(u[k - 1], (n + 1.0) / n);
    c = std::max(c, u[k] / denom);
  }
  rep.fitted_constant = rep.implication_violated ? std::numeric_limits<double>::infinity() : c;
  rep.normalised_constant = rep.fitted_constant * led.t0 * std::pow(led.cap, 2.0 / n);
  if (rep.fitted_constant == 0.0) {
    rep.below_threshold = true;
  } else if (std::isfinite(rep.fitted_constant)) {
    const double b = std::pow(2.0, (n + 2.0) / n);
    const double threshold = std::pow(rep.fitted_constant, -n) * std::pow(b, -n * n);
    rep.below_threshold = u[0] <= threshold;
  }
  return rep;
}

LinfDecayResult linf_decay_check(const Trajectory& traj, double t_min, double t_max, double tail_tolerance) {
  if (!(t_min > 0.0) || !(t_min < t_max)) throw std::invalid_argument("decay window needs 0 < t_min < t_max");
  LinfDecayResult r{0.0, 0.0, 0.0, CheckStatus::pass};
  const double norm0 = l2_norm(traj.initial());
  const double half_dim = 0.5 * static_cast<double>(traj.config.grid.dim());
  bool any = false;
  for (const auto& s : traj.snapshots) {
    if (s.time < t_min - 1e-12 || s.time > t_max + 1e-12) continue;
    any = true;
    const auto hat = forward(s.theta);
    double total = 0.0, tail = 0.0;
    for_each_mode(hat.grid, [&](std::size_t f, const std::array<double, 3>&, const std::array<int, 3>& m,
                                const std::array<std::size_t, 3>&) {
      const double e = std::norm(hat.coeffs[f]);
      total += e;
      for (std::size_t a = 0; a < hat.grid.dim(); ++a) {
        if (6 * std::abs(m[a]) > static_cast<int>(hat.grid.size(a))) {
          tail += e;
          break;
        }
      }
    });
    if (total > 0.0) r.spectral_tail = std::max(r.spectral_tail, tail / total);
    if (norm0 == 0.0) continue;
    const double sup = linf_norm(inverse(resample(hat, hat.grid.refined(2))));
    const double v = std::pow(s.time, half_dim) * sup / norm0;
    if (v > r.constant) {
      r.constant = v;
      r.argmax_time = s.time;
    }
  }
  if (!any) r.status = CheckStatus::inconclusive;
  if (r.spectral_tail > tail_tolerance) r.status = CheckStatus::inconclusive;
  if (!std::isfinite(r.constant)) r.status = CheckStatus::fail;
  return r;
}

ConvexFunction square_function() {
  return {"square", [](double s) { return s * s; }, [](double s) { return 2.0 * s; }};
}

ConvexFunction linear_function(double slope, double offset) {
  return {"linear", [=](double s) { return slope * s + offset; }, [=](double) { return slope; }};
}

ConvexFunction smoothed_positive_part(double level, double width) {
  if (!(width > 0.0)) throw std::invalid_argument("smoothing width must be positive");
  auto value = [=](double s) {
    const double x = (s - level) / width;
    return width * (std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))));
  };
  auto deriv = [=](double s) {
    const double x = (s - level) / width;
    return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
  };
  return {"smoothed_positive_part", value, deriv};
}

namespace {

void require_convex(const ConvexFunction& phi, double lo, double hi) {
  if (!(hi > lo)) {
    lo -= 1.0;
    hi += 1.0;
  }
  constexpr int samples = 256;
  const double h = (hi - lo) / samples;
  double scale = 0.0;
  for (int i = 0; i <= samples; ++i) scale = std::max(scale, std::abs(phi.value(lo + i * h)));
  for (int i = 1; i < samples; ++i) {
    const double s = lo + i * h;
    const double second = phi.value(s - h) - 2.0 * phi.value(s) + phi.value(s + h);
    if (second < -1e-10 * std::max(scale, 1.0)) {
      throw std::invalid_argument("function '" + phi.name + "' is not convex on the range of theta");
    }
  }
}

}  // namespace

CordobaResult cordoba_pointwise_check(const PhysicalField& theta, const ConvexFunction& phi, std::size_t refine) {
  if (refine == 0) throw std::invalid_argument("refine factor must be >= 1");
  require_finite(theta, "theta");
  const auto [lo, hi] = std::minmax_element(theta.values.begin(), theta.values.end());
  require_convex(phi, *lo, *hi);

  const Grid fine = theta.grid.refined(refine);
  const auto hat = resample(forward(theta), fine);
  const auto th = inverse(hat);
  const auto lam = inverse(fractional_laplacian(hat, 1.0));
  PhysicalField composed(fine);
  for (std::size_t i = 0; i < fine.total(); ++i) composed.values[i] = phi.value(th.values[i]);
  const auto comp_hat = forward(composed);
  const auto lam_comp = inverse(fractional_laplacian(comp_hat, 1.0));

  CordobaResult r{PhysicalField(fine), 0.0, 0.0, 0.0, 0.0, CheckStatus::pass};
  double s1 = 0.0, s2 = 0.0;
  r.min_residual = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < fine.total(); ++i) {
    const double a = phi.derivative(th.values[i]) * lam.values[i];
    r.residual.values[i] = a - lam_comp.values[i];
    s1 = std::max(s1, std::abs(a));
    s2 = std::max(s2, std::abs(lam_comp.values[i]));
    r.min_residual = std::min(r.min_residual, r.residual.values[i]);
  }
  r.scale = std::max(s1, s2);
  for_each_mode(fine, [&](std::size_t f, const std::array<double, 3>& k, const std::array<int, 3>& m,
                          const std::array<std::size_t, 3>&) {
    for (std::size_t a = 0; a < fine.dim(); ++a) {
      if (8 * std::abs(m[a]) > 3 * static_cast<int>(fine.size(a))) {
        r.aliasing_allowance += std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) * std::abs(comp_hat.coeffs[f]);
        break;
      }
    }
  });
  r.tolerance = 1e-8 * r.scale + r.aliasing_allowance;
  r.status = r.min_residual >= -r.tolerance ? CheckStatus::pass : CheckStatus::fail;
  return r;
}

namespace {

// exp(1 - 1/(1 - (s/r)^2)) on |s| < r, with its derivative.
double bump(double s, double r) {
  const double q = s / r;
  if (std::abs(q) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - q * q));
}

double bump_derivative(double s, double r) {
  const double q = s / r;
  if (std::abs(q) >= 1.0) return 0.0;
  const double d = 1.0 - q * q;
  return bump(s, r) * (-2.0 * q / (r * d * d));
}

double periodic_offset(double x, double c, double length) {
  double d = std::fmod(x - c, length);
  if (d < -0.5 * length) d += length;
  if (d >= 0.5 * length) d -= length;
  return d;
}

struct CutoffSamples {
  ExtensionField eta;
  std::vector<double> boundary;       // eta(x, 0)
  std::vector<double> boundary_grad;  // |grad eta|^2 at z = 0
};

CutoffSamples build_cutoff(const Grid& g, const LocalCutoff& cut, const std::vector<double>& z) {
  const std::size_t dim = g.dim();
  std::vector<std::vector<double>> val(dim), der(dim);
  for (std::size_t a = 0; a < dim; ++a) {
    for (std::size_t i = 0; i < g.size(a); ++i) {
      const double d = periodic_offset(static_cast<double>(i) * g.spacing(a), cut.centre[a], g.length(a));
      val[a].push_back(bump(d, cut.radius));
      der[a].push_back(bump_derivative(d, cut.radius));
    }
  }
  CutoffSamples out{ExtensionField(g, z), std::vector<double>(g.total()), std::vector<double>(g.total())};
  for (std::size_t p = 0; p < g.total(); ++p) {
    const auto idx = g.unflat(p);
    double prod = 1.0;
    for (std::size_t a = 0; a < dim; ++a) prod *= val[a][idx[a]];
    double grad2 = 0.0;
    for (std::size_t a = 0; a < dim; ++a) {
      double part = der[a][idx[a]];
      for (std::size_t b = 0; b < dim; ++b) {
        if (b != a) part *= val[b][idx[b]];
      }
      grad2 += part * part;
    }
    out.boundary[p] = prod;
    out.boundary_grad[p] = grad2;  // the z factor has zero slope at z = 0
    for (std::size_t iz = 0; iz < z.size(); ++iz) out.eta.level(iz)[p] = prod * bump(z[iz], cut.radius);
  }
  return out;
}

}  // namespace

LocalEnergyResult local_energy_check(const Trajectory& traj, const LocalCutoff& cutoff, double t1, double t2,
                                     const LocalEnergyOptions& opt) {
  const Grid& g = traj.config.grid;
  if (traj.config.beta != 1.0) throw std::invalid_argument("local energy check needs beta = 1");
  if (cutoff.centre.size() != g.dim()) throw std::invalid_argument("cutoff centre must have one entry per axis");
  if (!(cutoff.radius > 0.0)) throw std::invalid_argument("cutoff radius must be positive");
  for (std::size_t a = 0; a < g.dim(); ++a) {
    if (2.0 * cutoff.radius >= g.length(a)) {
      throw std::invalid_argument("cutoff support does not fit inside one period of the torus");
    }
  }
  if (opt.z_count < 3) throw std::invalid_argument("need at least three z levels");
  if (!(t1 < t2)) throw std::invalid_argument("window needs t1 < t2");
  const std::size_t i1 = traj.snapshot_at(t1), i2 = traj.snapshot_at(t2);

  const auto z = uniform_z_levels(cutoff.radius / static_cast<double>(opt.z_count - 1), opt.z_count);
  const auto cut = build_cutoff(g, cutoff, z);
  const double cell = g.cell_volume();
  const double kappa = traj.config.kappa;

  LocalEnergyResult r{};
  auto mass = [&](const PhysicalField& th) {
    double m = 0.0;
    for (std::size_t p = 0; p < g.total(); ++p) {
      const double v = cut.boundary[p] * std::max(th.values[p] - opt.level, 0.0);
      m += v * v;
    }
    return m * cell;
  };
  double prev_a = 0, prev_b = 0, prev_c = 0, t_prev = 0;
  for (std::size_t i = i1; i <= i2; ++i) {
    const auto& snap = traj.snapshots[i];
    const auto shifted = add_constant(snap.theta, -opt.level);
    const auto ext = harmonic_extension(shifted, z);
    const double a = kappa * extension_dirichlet_energy(ext, cut.eta);
    const double b = kappa * extension_cutoff_gradient_energy(ext, cut.eta);
    double c = 0.0;
    for (std::size_t p = 0; p < g.total(); ++p) {
      const double v = std::max(shifted.values[p], 0.0);
      c += cut.boundary_grad[p] * v * v;
    }
    c *= cell;
    if (i > i1) {
      const double h = snap.time - t_prev;
      r.extension_energy += 0.5 * h * (prev_a + a);
      r.cutoff_energy += 0.5 * h * (prev_b + b);
      r.boundary_cutoff += 0.5 * h * (prev_c + c);
    }
    prev_a = a;
    prev_b = b;
    prev_c = c;
    t_prev = snap.time;

    const auto v = traj.velocity_at(i);
    r.bmo_bound = std::max(r.bmo_bound, bmo_seminorm(v));
    r.ball_mean = std::max(r.ball_mean, ball_mean_term(v, cutoff.centre, cutoff.radius));
  }
  r.mass_t1 = mass(traj.snapshots[i1].theta);
  r.mass_t2 = mass(traj.snapshots[i2].theta);

  const double scale = std::max({r.extension_energy, r.cutoff_energy, r.mass_t1, r.mass_t2});
  auto smallest_phi = [&](double excess) {
    if (excess <= opt.phi_tolerance * scale) return 0.0;
    if (r.boundary_cutoff <= 0.0) return std::numeric_limits<double>::infinity();
    return excess / r.boundary_cutoff;
  };
  r.phi_hat = smallest_phi(r.extension_energy + 0.5 * r.mass_t2 - 0.5 * r.mass_t1 - r.cutoff_energy);
  r.phi_hat_stated = smallest_phi(r.extension_energy + r.mass_t2 - r.mass_t1 - r.cutoff_energy);
  r.status = std::isfinite(r.phi_hat) ? CheckStatus::pass : CheckStatus::fail;
  return r;
}

double bmo_seminorm(const VectorField& u) {
  if (u.empty()) return 0.0;
  const Grid& g = u.front().grid;
  const std::size_t dim = g.dim(), nc = u.size();
  for (const auto& c : u) {
    if (!(c.grid == g)) throw std::invalid_argument("vector components must share a grid");
  }
  double best = 0.0;
  for (std::size_t level = 0;; ++level) {
    std::vector<std::size_t> side(dim), count(dim);
    bool ok = true;
    for (std::size_t a = 0; a < dim; ++a) {
      side[a] = g.size(a) >> level;
      if (side[a] < 2) ok = false;
      count[a] = std::size_t{1} << level;
    }
    if (!ok) break;
    std::size_t cubes = 1;
    for (auto c : count) cubes *= c;
    std::vector<std::size_t> owner(g.total());
    for (std::size_t p = 0; p < g.total(); ++p) {
      const auto idx = g.unflat(p);
      std::size_t id = 0;
      for (std::size_t a = 0; a < dim; ++a) id = id * count[a] + idx[a] / side[a];
      owner[p] = id;
    }
    const double per_cube = static_cast<double>(g.total() / cubes);
    std::vector<double> means(cubes * nc, 0.0);
    for (std::size_t p = 0; p < g.total(); ++p) {
      for (std::size_t c = 0; c < nc; ++c) means[owner[p] * nc + c] += u[c].values[p];
    }
    for (auto& m : means) m /= per_cube;
    std::vector<double> dev(cubes, 0.0);
    for (std::size_t p = 0; p < g.total(); ++p) {
      double s = 0.0;
      for (std::size_t c = 0; c < nc; ++c) {
        const double d = u[c].values[p] - means[owner[p] * nc + c];
        s += d * d;
      }
      dev[owner[p]] += std::sqrt(s);
    }
    for (double d : dev) best = std::max(best, d / per_cube);
  }
  return best;
}

double bmo_seminorm(const PhysicalField& u) { return bmo_seminorm(VectorField{u}); }

double ball_mean_term(const VectorField& v, const std::vector<double>& centre, double radius) {
  if (v.empty()) return 0.0;
  const Grid& g = v.front().grid;
  if (centre.size() != g.dim()) throw std::invalid_argument("ball centre must have one entry per axis");
  std::vector<double> sum(v.size(), 0.0);
  for (std::size_t p = 0; p < g.total(); ++p) {
    const auto idx = g.unflat(p);
    bool inside = true;
    for (std::size_t a = 0; a < g.dim(); ++a) {
      const double d = periodic_offset(static_cast<double>(idx[a]) * g.spacing(a), centre[a], g.length(a));
      if (std::abs(d) > radius) inside = false;
    }
    if (!inside) continue;
    for (std::size_t c = 0; c < v.size(); ++c) sum[c] += v[c].values[p];
  }
  double s = 0.0;
  for (double x : sum) s += x * x;
  return std::sqrt(s) * g.cell_volume();
}

}  // namespace sqglab
