#include "sqglab/galerkin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace sqglab {

namespace {

constexpr double pi = std::numbers::pi;

std::vector<std::vector<int>> box_indices(std::size_t dim, int r) {
  std::vector<std::vector<int>> out;
  std::vector<int> m(dim, 1);
  while (true) {
    out.push_back(m);
    std::size_t a = dim;
    while (a > 0) {
      --a;
      if (m[a] < r) {
        ++m[a];
        break;
      }
      m[a] = 1;
      if (a == 0) return out;
    }
  }
}

double squared(const std::vector<int>& m) {
  double s = 0.0;
  for (int v : m) s += static_cast<double>(v) * v;
  return s;
}

// Applies the 1D orthonormal midpoint sine analysis along every axis:
//   c_m = sqrt(2/pi) (pi/Q) sum_j g_j sin(m x_j),  m = 1..modes.
std::vector<double> sine_analysis(const EigenBasis& basis, const std::vector<double>& values, std::size_t modes) {
  const std::size_t q = basis.quadrature_points();
  const std::size_t dim = basis.dim();
  Eigen::MatrixXd phi(modes, q);
  const double scale = std::sqrt(2.0 / pi) * pi / static_cast<double>(q);
  for (std::size_t m = 0; m < modes; ++m)
    for (std::size_t j = 0; j < q; ++j) phi(m, j) = scale * std::sin(static_cast<double>(m + 1) * basis.nodes()[j]);

  // Work array with shape (n_0, ..., n_{dim-1}); axis a is transformed from q to `modes`.
  std::vector<std::size_t> shape(dim, q);
  std::vector<double> cur = values;
  for (std::size_t a = 0; a < dim; ++a) {
    std::size_t outer = 1, inner = 1;
    for (std::size_t b = 0; b < a; ++b) outer *= shape[b];
    for (std::size_t b = a + 1; b < dim; ++b) inner *= shape[b];
    std::vector<double> next(outer * modes * inner, 0.0);
    for (std::size_t o = 0; o < outer; ++o) {
      for (std::size_t m = 0; m < modes; ++m) {
        double* dst = &next[(o * modes + m) * inner];
        for (std::size_t j = 0; j < q; ++j) {
          const double w = phi(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(j));
          const double* src = &cur[(o * q + j) * inner];
          for (std::size_t i = 0; i < inner; ++i) dst[i] += w * src[i];
        }
      }
    }
    shape[a] = modes;
    cur = std::move(next);
  }
  return cur;
}

// Hermite-corrected trapezoid over [i1, i2] of samples with derivatives.
double hermite_integral(const std::vector<double>& t, const std::vector<double>& f, const std::vector<double>& df,
                        std::size_t i1, std::size_t i2) {
  double s = 0.0;
  for (std::size_t i = i1; i < i2; ++i) {
    const double h = t[i + 1] - t[i];
    s += 0.5 * h * (f[i] + f[i + 1]) + h * h / 12.0 * (df[i] - df[i + 1]);
  }
  return s;
}

double trapezoid(const std::vector<double>& t, const std::vector<double>& f, std::size_t stride) {
  double s = 0.0;
  std::size_t i = 0;
  for (; i + stride < t.size(); i += stride) s += 0.5 * (t[i + stride] - t[i]) * (f[i] + f[i + stride]);
  if (i + 1 < t.size()) s += 0.5 * (t.back() - t[i]) * (f[i] + f.back());
  return s;
}

}  // namespace

EigenBasis::EigenBasis(std::size_t dim, std::size_t k_max, std::size_t quadrature) : dim_(dim) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("eigen basis dimension must be 1, 2 or 3");
  if (k_max < 1) throw std::invalid_argument("k_max must be >= 1");

  int r = static_cast<int>(std::ceil(std::pow(static_cast<double>(k_max), 1.0 / static_cast<double>(dim)))) + 1;
  std::vector<std::vector<int>> chosen;
  while (true) {
    auto all = box_indices(dim, r);
    std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
      const double ea = squared(a), eb = squared(b);
      if (ea != eb) return ea < eb;
      return a < b;
    });
    if (all.size() >= k_max) {
      all.resize(k_max);
      // Every index outside the box has eigenvalue >= (r+1)^2 + dim - 1.
      const double outside = static_cast<double>(r + 1) * (r + 1) + static_cast<double>(dim) - 1.0;
      if (squared(all.back()) < outside) {
        chosen = std::move(all);
        break;
      }
    }
    ++r;
  }
  for (const auto& m : chosen) {
    const double e = squared(m);
    modes_.push_back({m, e, std::sqrt(e)});
    max_index_ = std::max(max_index_, *std::max_element(m.begin(), m.end()));
  }

  const std::size_t needed = 4 * static_cast<std::size_t>(max_index_);
  q_ = quadrature == 0 ? needed : quadrature;
  if (q_ < needed) {
    throw std::invalid_argument("quadrature of " + std::to_string(q_) + " points per axis is too coarse for mode index " +
                                std::to_string(max_index_) + " (need >= " + std::to_string(needed) + ")");
  }
  total_ = 1;
  for (std::size_t a = 0; a < dim_; ++a) total_ *= q_;
  weight_ = std::pow(pi / static_cast<double>(q_), static_cast<double>(dim_));
  norm_ = std::pow(2.0 / pi, 0.5 * static_cast<double>(dim_));
  nodes_.resize(q_);
  for (std::size_t j = 0; j < q_; ++j) nodes_[j] = (static_cast<double>(j) + 0.5) * pi / static_cast<double>(q_);

  sin_table_.assign(static_cast<std::size_t>(max_index_) + 1, std::vector<double>(q_));
  cos_table_.assign(static_cast<std::size_t>(max_index_) + 1, std::vector<double>(q_));
  for (int m = 0; m <= max_index_; ++m) {
    for (std::size_t j = 0; j < q_; ++j) {
      sin_table_[static_cast<std::size_t>(m)][j] = std::sin(m * nodes_[j]);
      cos_table_[static_cast<std::size_t>(m)][j] = std::cos(m * nodes_[j]);
    }
  }
  sample_matrix_.resize(static_cast<Eigen::Index>(total_), static_cast<Eigen::Index>(modes_.size()));
  for (std::size_t k = 0; k < modes_.size(); ++k) {
    const auto s = samples(k);
    for (std::size_t p = 0; p < total_; ++p) sample_matrix_(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(k)) = s[p];
  }
}

std::array<double, 3> EigenBasis::point(std::size_t p) const {
  std::array<double, 3> x{0.0, 0.0, 0.0};
  for (std::size_t a = dim_; a > 0; --a) {
    x[a - 1] = nodes_[p % q_];
    p /= q_;
  }
  return x;
}

double EigenBasis::eval(std::size_t k, const std::array<double, 3>& x) const {
  const auto& m = modes_.at(k).index;
  double v = norm_;
  for (std::size_t a = 0; a < dim_; ++a) v *= std::sin(m[a] * x[a]);
  return v;
}

std::vector<double> EigenBasis::samples(std::size_t k) const { return gradient_samples(k, dim_); }

// axis == dim_ means "no derivative".
std::vector<double> EigenBasis::gradient_samples(std::size_t k, std::size_t axis) const {
  const auto& m = modes_.at(k).index;
  std::vector<double> out(total_);
  for (std::size_t p = 0; p < total_; ++p) {
    std::size_t rest = p;
    double v = norm_;
    for (std::size_t a = dim_; a > 0; --a) {
      const std::size_t j = rest % q_;
      rest /= q_;
      const auto mi = static_cast<std::size_t>(m[a - 1]);
      v *= (a - 1 == axis) ? m[a - 1] * cos_table_[mi][j] : sin_table_[mi][j];
    }
    out[p] = v;
  }
  return out;
}

Eigen::MatrixXd EigenBasis::gram() const { return weight_ * (sample_matrix_.transpose() * sample_matrix_); }

double EigenBasis::orthonormality_defect() const {
  const auto g = gram();
  return (g - Eigen::MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

std::vector<double> EigenBasis::reconstruct(const std::vector<double>& coeffs) const {
  if (coeffs.size() != modes_.size()) throw std::invalid_argument("coefficient count differs from basis size");
  const Eigen::Map<const Eigen::VectorXd> f(coeffs.data(), static_cast<Eigen::Index>(coeffs.size()));
  const Eigen::VectorXd v = sample_matrix_ * f;
  return {v.data(), v.data() + v.size()};
}

std::vector<double> EigenBasis::project(const std::vector<double>& values) const {
  if (values.size() != total_) throw std::invalid_argument("sample count differs from quadrature size");
  const Eigen::Map<const Eigen::VectorXd> g(values.data(), static_cast<Eigen::Index>(values.size()));
  const Eigen::VectorXd f = weight_ * (sample_matrix_.transpose() * g);
  return {f.data(), f.data() + f.size()};
}

EigenBasis build_basis(std::size_t dim, std::size_t k_max, std::size_t quadrature) {
  return EigenBasis(dim, k_max, quadrature);
}

BoxDrift zero_drift(const EigenBasis& basis) {
  return BoxDrift{std::vector<std::vector<double>>(basis.dim(), std::vector<double>(basis.quadrature_size(), 0.0))};
}

BoxDrift sample_drift(const EigenBasis& basis, const std::function<std::array<double, 3>(const std::array<double, 3>&)>& v) {
  auto out = zero_drift(basis);
  for (std::size_t p = 0; p < basis.quadrature_size(); ++p) {
    const auto val = v(basis.point(p));
    for (std::size_t a = 0; a < basis.dim(); ++a) out.components[a][p] = val[a];
  }
  return out;
}

StreamFunction random_stream_function(int max_mode, double amplitude, std::uint64_t seed) {
  if (max_mode < 1) throw std::invalid_argument("stream function needs max_mode >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  StreamFunction s;
  for (int p = 1; p <= max_mode; ++p) {
    for (int q = 1; q <= max_mode; ++q) {
      s.modes.push_back({p, q});
      s.coeffs.push_back(amplitude * u(rng) / (p * p + q * q));
    }
  }
  return s;
}

StreamFunction stream_from_samples(const EigenBasis& basis, const std::vector<double>& values) {
  if (basis.dim() != 2) throw std::invalid_argument("stream functions are two dimensional");
  if (values.size() != basis.quadrature_size()) throw std::invalid_argument("stream samples must match the quadrature grid");
  const std::size_t modes = basis.quadrature_points() / 2;
  const auto c = sine_analysis(basis, values, modes);
  StreamFunction s;
  for (std::size_t p = 0; p < modes; ++p) {
    for (std::size_t q = 0; q < modes; ++q) {
      const double v = c[p * modes + q];
      if (v == 0.0) continue;
      s.modes.push_back({static_cast<int>(p + 1), static_cast<int>(q + 1)});
      s.coeffs.push_back(2.0 / pi * v);
    }
  }
  return s;
}

BoxDrift drift_from_stream(const EigenBasis& basis, const StreamFunction& psi) {
  if (basis.dim() != 2) throw std::invalid_argument("stream function drift needs a 2D basis");
  if (psi.modes.size() != psi.coeffs.size()) throw std::invalid_argument("stream function modes and coefficients differ in length");
  auto out = zero_drift(basis);
  const std::size_t q = basis.quadrature_points();
  for (std::size_t i = 0; i < psi.modes.size(); ++i) {
    const auto [mp, mq] = psi.modes[i];
    const double c = psi.coeffs[i];
    for (std::size_t jx = 0; jx < q; ++jx) {
      const double x = basis.nodes()[jx];
      const double sx = std::sin(mp * x), cx = std::cos(mp * x);
      for (std::size_t jy = 0; jy < q; ++jy) {
        const double y = basis.nodes()[jy];
        const std::size_t p = jx * q + jy;
        out.components[0][p] -= c * mq * sx * std::cos(mq * y);
        out.components[1][p] += c * mp * cx * std::sin(mq * y);
      }
    }
  }
  return out;
}

CouplingMatrix coupling_matrix(const EigenBasis& basis, const BoxDrift& v) {
  if (v.components.size() != basis.dim()) throw std::invalid_argument("drift needs one component per axis");
  for (const auto& c : v.components) {
    if (c.size() != basis.quadrature_size()) throw std::invalid_argument("drift samples must match the quadrature grid");
  }
  const auto kk = static_cast<Eigen::Index>(basis.size());
  const auto pp = static_cast<Eigen::Index>(basis.quadrature_size());
  // Column k holds v . grad(sigma_k) at the quadrature points.
  Eigen::MatrixXd transport = Eigen::MatrixXd::Zero(pp, kk);
  for (std::size_t a = 0; a < basis.dim(); ++a) {
    const Eigen::Map<const Eigen::VectorXd> va(v.components[a].data(), pp);
    for (Eigen::Index k = 0; k < kk; ++k) {
      const auto g = basis.gradient_samples(static_cast<std::size_t>(k), a);
      transport.col(k) += va.cwiseProduct(Eigen::Map<const Eigen::VectorXd>(g.data(), pp));
    }
  }
  Eigen::MatrixXd sigma(pp, kk);
  for (Eigen::Index k = 0; k < kk; ++k) {
    const auto s = basis.samples(static_cast<std::size_t>(k));
    sigma.col(k) = Eigen::Map<const Eigen::VectorXd>(s.data(), pp);
  }
  CouplingMatrix out;
  out.a = basis.quadrature_weight() * (transport.transpose() * sigma);
  out.antisymmetry_defect = kk == 0 ? 0.0 : (out.a + out.a.transpose()).cwiseAbs().maxCoeff();
  out.antisymmetric = out.antisymmetry_defect < 1e-8;
  return out;
}

GalerkinSystem::GalerkinSystem(const EigenBasis& basis, const CouplingMatrix& a, double epsilon, bool dissipation) {
  if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon must be >= 0");
  const auto kk = static_cast<Eigen::Index>(basis.size());
  if (a.a.rows() != kk || a.a.cols() != kk) throw std::invalid_argument("coupling matrix size differs from basis size");
  damping.resize(basis.size(), 0.0);
  if (dissipation) {
    for (std::size_t k = 0; k < basis.size(); ++k) damping[k] = epsilon * basis.mode(k).eigenvalue + basis.mode(k).frequency;
  }
  generator = a.a;
  for (Eigen::Index k = 0; k < kk; ++k) generator(k, k) -= damping[static_cast<std::size_t>(k)];
}

double GalerkinSystem::spectral_bound() const {
  return generator.size() == 0 ? 0.0 : generator.cwiseAbs().rowwise().sum().maxCoeff();
}

std::vector<double> GalerkinSystem::apply(const std::vector<double>& f) const {
  const Eigen::Map<const Eigen::VectorXd> v(f.data(), static_cast<Eigen::Index>(f.size()));
  const Eigen::VectorXd r = generator * v;
  return {r.data(), r.data() + r.size()};
}

GalerkinState galerkin_step(const GalerkinState& state, const GalerkinSystem& system, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (state.coeffs.size() != system.damping.size()) throw std::invalid_argument("state size differs from system size");
  if (dt * system.spectral_bound() > 2.5) {
    throw std::invalid_argument("dt = " + std::to_string(dt) + " is outside the RK4 stability bound (spectral bound " +
                                std::to_string(system.spectral_bound()) + ")");
  }
  const auto& g = system.generator;
  const Eigen::Map<const Eigen::VectorXd> f(state.coeffs.data(), static_cast<Eigen::Index>(state.coeffs.size()));
  const Eigen::VectorXd k1 = g * f;
  const Eigen::VectorXd k2 = g * (f + 0.5 * dt * k1);
  const Eigen::VectorXd k3 = g * (f + 0.5 * dt * k2);
  const Eigen::VectorXd k4 = g * (f + dt * k3);
  const Eigen::VectorXd next = f + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

  GalerkinState out;
  out.coeffs.assign(next.data(), next.data() + next.size());
  out.time = state.time + dt;
  out.epsilon = state.epsilon;
  const double before = f.squaredNorm();
  const double after = next.squaredNorm();
  out.growth_flagged = state.growth_flagged || !std::isfinite(after) || after > before * (1.0 + 1e-12) + 1e-300;
  return out;
}

std::vector<GalerkinState> galerkin_run(const GalerkinState& initial, const GalerkinSystem& system, double dt,
                                        double t_end) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  std::vector<GalerkinState> states{initial};
  const double span = t_end - initial.time;
  if (span < 0.0) throw std::invalid_argument("t_end precedes the initial time");
  const auto steps = static_cast<std::size_t>(std::ceil(span / dt - 1e-9));
  for (std::size_t n = 0; n < steps; ++n) {
    const double t = states.back().time;
    const double h = (n + 1 == steps) ? t_end - t : dt;
    if (!(h > 0.0)) break;
    states.push_back(galerkin_step(states.back(), system, h));
  }
  if (!states.empty()) states.back().time = std::max(states.back().time, t_end);
  return states;
}

double galerkin_energy_identity(const std::vector<GalerkinState>& states, const GalerkinSystem& system, std::size_t i1,
                                std::size_t i2) {
  if (i1 > i2 || i2 >= states.size()) throw std::invalid_argument("energy identity window out of range");
  std::vector<double> t, d, dd;
  for (const auto& s : states) {
    const auto fp = system.apply(s.coeffs);
    double dk = 0.0, ddk = 0.0;
    for (std::size_t k = 0; k < s.coeffs.size(); ++k) {
      dk += system.damping[k] * s.coeffs[k] * s.coeffs[k];
      ddk += 2.0 * system.damping[k] * s.coeffs[k] * fp[k];
    }
    t.push_back(s.time);
    d.push_back(dk);
    dd.push_back(ddk);
  }
  auto energy = [&](std::size_t i) {
    double e = 0.0;
    for (double f : states[i].coeffs) e += f * f;
    return e;
  };
  return energy(i2) - energy(i1) + 2.0 * hermite_integral(t, d, dd, i1, i2);
}

double galerkin_energy_identity(const std::vector<GalerkinState>& states, const GalerkinSystem& system) {
  if (states.empty()) throw std::invalid_argument("empty Galerkin trajectory");
  return galerkin_energy_identity(states, system, 0, states.size() - 1);
}

std::vector<TruncationLevelResult> galerkin_truncation_check(const EigenBasis& basis, const GalerkinSystem& system,
                                                             const std::vector<GalerkinState>& states,
                                                             const std::vector<double>& levels,
                                                             double projection_tolerance) {
  if (states.size() < 2) throw std::invalid_argument("truncation check needs at least two states");
  const double eps = states.front().epsilon;
  const std::size_t modes = basis.quadrature_points() / 2;
  const double w = basis.quadrature_weight();

  double energy0 = 0.0;
  for (double f : states.front().coeffs) energy0 += f * f;

  std::vector<std::vector<double>> theta;
  theta.reserve(states.size());
  for (const auto& s : states) theta.push_back(basis.reconstruct(s.coeffs));
  std::vector<double> times;
  for (const auto& s : states) times.push_back(s.time);

  // Per-mode weights |m| + eps |m|^2 of the measurement modes.
  std::vector<double> diss_weight;
  {
    std::vector<std::size_t> idx(basis.dim(), 0);
    std::size_t total = 1;
    for (std::size_t a = 0; a < basis.dim(); ++a) total *= modes;
    diss_weight.resize(total);
    for (std::size_t c = 0; c < total; ++c) {
      std::size_t rest = c;
      double m2 = 0.0;
      for (std::size_t a = basis.dim(); a > 0; --a) {
        const double m = static_cast<double>(rest % modes + 1);
        rest /= modes;
        m2 += m * m;
      }
      diss_weight[c] = std::sqrt(m2) + eps * m2;
    }
  }

  std::vector<TruncationLevelResult> out;
  for (double level : levels) {
    TruncationLevelResult r{level, 0.0, 0.0, 0.0, 0.0, 0.0, "pass"};
    if (std::isinf(level) && level < 0.0) {
      const auto last = states.size() - 1;
      double e1 = 0.0, e2 = 0.0;
      for (double f : states.front().coeffs) e1 += f * f;
      for (double f : states[last].coeffs) e2 += f * f;
      r.residual = galerkin_energy_identity(states, system);
      r.rhs = e1;
      r.lhs = e1 + r.residual;
      r.tolerance = 1e-8 * std::max(energy0, std::numeric_limits<double>::min());
      r.status = std::abs(r.residual) <= r.tolerance ? "pass" : "fail";
      out.push_back(r);
      continue;
    }
    std::vector<double> energy(states.size()), diss(states.size());
    double worst_tail = 0.0;
    for (std::size_t i = 0; i < states.size(); ++i) {
      std::vector<double> gamma(theta[i].size());
      double e = 0.0;
      for (std::size_t p = 0; p < gamma.size(); ++p) {
        gamma[p] = std::max(theta[i][p] - level, 0.0);
        e += gamma[p] * gamma[p];
      }
      e *= w;
      energy[i] = e;
      if (e == 0.0) continue;
      const auto c = sine_analysis(basis, gamma, modes);
      double kept = 0.0, d = 0.0;
      for (std::size_t m = 0; m < c.size(); ++m) {
        kept += c[m] * c[m];
        d += diss_weight[m] * c[m] * c[m];
      }
      diss[i] = d;
      worst_tail = std::max(worst_tail, std::max(e - kept, 0.0));
    }
    const double integral = trapezoid(times, diss, 1);
    const double coarse = trapezoid(times, diss, 2);
    r.rhs = energy.front();
    r.lhs = energy.back() + 2.0 * integral;
    r.residual = r.lhs - r.rhs;
    r.tolerance = 1e-6 * energy0 + 2.0 * std::abs(integral - coarse) / 3.0 * 2.0;
    r.projection_error = r.rhs > 0.0 ? worst_tail / r.rhs : (worst_tail > 0.0 ? INFINITY : 0.0);
    if (r.residual <= r.tolerance) {
      r.status = "pass";
    } else {
      r.status = r.projection_error > projection_tolerance ? "inconclusive" : "fail";
    }
    out.push_back(r);
  }
  return out;
}

}  // namespace sqglab
