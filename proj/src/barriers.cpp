#include "sqglab/barriers.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "sqglab/extension.hpp"

namespace sqglab {

namespace {

constexpr double pi = std::numbers::pi;

// In-place DST-I over the transverse axes; applying it twice multiplies by prod 2 n_a.
class SineTransform {
 public:
  explicit SineTransform(const std::vector<std::size_t>& intervals) {
    std::vector<int> n;
    std::vector<fftw_r2r_kind> kinds;
    size_ = 1;
    scale_ = 1.0;
    for (auto m : intervals) {
      n.push_back(static_cast<int>(m - 1));
      kinds.push_back(FFTW_RODFT00);
      size_ *= m - 1;
      scale_ *= 2.0 * static_cast<double>(m);
    }
    buffer_.assign(size_, 0.0);
    plan_ = fftw_plan_r2r(static_cast<int>(n.size()), n.data(), buffer_.data(), buffer_.data(), kinds.data(),
                          FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plan_) throw std::runtime_error("could not plan sine transform");
  }
  ~SineTransform() { fftw_destroy_plan(plan_); }
  SineTransform(const SineTransform&) = delete;
  SineTransform& operator=(const SineTransform&) = delete;

  std::size_t size() const { return size_; }
  double inverse_scale() const { return 1.0 / scale_; }
  void apply(double* data) const { fftw_execute_r2r(plan_, data, data); }

 private:
  fftw_plan plan_ = nullptr;
  std::vector<double> buffer_;
  std::size_t size_ = 1;
  double scale_ = 1.0;
};

// Flat interior node index -> per-axis 1-based indices.
std::vector<std::size_t> unflat_interior(std::size_t flat, const std::vector<std::size_t>& intervals) {
  std::vector<std::size_t> idx(intervals.size());
  for (std::size_t a = intervals.size(); a-- > 0;) {
    const std::size_t m = intervals[a] - 1;
    idx[a] = flat % m + 1;
    flat /= m;
  }
  return idx;
}

}  // namespace

std::vector<double> solve_layered_laplace(const LayeredLaplace& p) {
  if (p.transverse.empty()) throw std::invalid_argument("need at least one transverse axis");
  for (auto m : p.transverse) {
    if (m < 2) throw std::invalid_argument("every axis needs at least two intervals");
  }
  if (p.layers < 2) throw std::invalid_argument("layer axis needs at least two intervals");
  SineTransform dst(p.transverse);
  const std::size_t t = dst.size();
  if (p.bottom.size() != t || p.top.size() != t) throw std::invalid_argument("face data has the wrong size");

  std::vector<double> bottom = p.bottom, top = p.top;
  dst.apply(bottom.data());
  dst.apply(top.data());

  const std::size_t inner = p.layers - 1;
  std::vector<double> out(inner * t);
  std::vector<double> cprime(inner), dprime(inner);
  for (std::size_t mode = 0; mode < t; ++mode) {
    const auto m = unflat_interior(mode, p.transverse);
    double shift = 0.0;
    for (std::size_t a = 0; a < m.size(); ++a) {
      shift += 2.0 - 2.0 * std::cos(pi * static_cast<double>(m[a]) / static_cast<double>(p.transverse[a]));
    }
    // u_{j-1} - (2 + shift) u_j + u_{j+1} = 0 with u_0 = bottom, u_L = top.
    const double diag = -(2.0 + shift);
    for (std::size_t j = 0; j < inner; ++j) {
      double rhs = 0.0;
      if (j == 0) rhs -= bottom[mode];
      if (j + 1 == inner) rhs -= top[mode];
      const double denom = j == 0 ? diag : diag - cprime[j - 1];
      cprime[j] = 1.0 / denom;
      dprime[j] = j == 0 ? rhs / denom : (rhs - dprime[j - 1]) / denom;
    }
    double next = 0.0;
    for (std::size_t j = inner; j-- > 0;) {
      const double u = dprime[j] - (j + 1 < inner ? cprime[j] * next : 0.0);
      out[j * t + mode] = u;
      next = u;
    }
  }
  for (std::size_t j = 0; j < inner; ++j) {
    double* layer = out.data() + j * t;
    dst.apply(layer);
    for (std::size_t i = 0; i < t; ++i) layer[i] *= dst.inverse_scale();
  }

  // Residual of the h^2-scaled stencil on every interior node.
  double scale = std::numeric_limits<double>::min();
  for (double v : p.bottom) scale = std::max(scale, std::abs(v));
  for (double v : p.top) scale = std::max(scale, std::abs(v));
  std::vector<std::size_t> stride(p.transverse.size());
  {
    std::size_t s = 1;
    for (std::size_t a = p.transverse.size(); a-- > 0;) {
      stride[a] = s;
      s *= p.transverse[a] - 1;
    }
  }
  auto value = [&](std::size_t j, std::size_t i) {
    if (j == 0) return p.bottom[i];
    if (j == p.layers) return p.top[i];
    return out[(j - 1) * t + i];
  };
  double resid = 0.0;
  for (std::size_t j = 1; j < p.layers; ++j) {
    for (std::size_t i = 0; i < t; ++i) {
      const auto idx = unflat_interior(i, p.transverse);
      double lap = value(j - 1, i) + value(j + 1, i) - 2.0 * (1.0 + static_cast<double>(idx.size())) * value(j, i);
      for (std::size_t a = 0; a < idx.size(); ++a) {
        if (idx[a] > 1) lap += value(j, i - stride[a]);
        if (idx[a] + 1 < p.transverse[a]) lap += value(j, i + stride[a]);
      }
      resid = std::max(resid, std::abs(lap));
    }
  }
  if (resid > 1e-9 * scale) {
    throw std::runtime_error("Laplace solve did not converge: residual " + std::to_string(resid));
  }
  return out;
}

BarrierValue barrier_b2_eval(const BarrierB2& b, double x, double z) {
  if (b.p_max < 1) throw std::invalid_argument("p_max must be >= 1");
  if (!(x >= 0.0) || !std::isfinite(x)) throw std::invalid_argument("b2 is defined for x >= 0");
  if (!(z >= 0.0 && z <= 1.0)) throw std::invalid_argument("b2 is defined for z in [0, 1]");
  BarrierValue r{0.0, 0.0};
  if (z == 0.0 || z == 1.0) return r;
  for (int p = 0; p < b.p_max; ++p) {
    const double n = 2.0 * p + 1.0;
    r.value += 4.0 * b.boundary_value / (pi * n) * std::exp(-n * pi * x) * std::sin(n * pi * z);
  }
  if (x == 0.0) {
    r.tail_bound = std::numeric_limits<double>::infinity();
  } else {
    const double n = 2.0 * b.p_max + 1.0;
    r.tail_bound = 4.0 * std::abs(b.boundary_value) / (pi * n) * std::exp(-n * pi * x) / (1.0 - std::exp(-2.0 * pi * x));
  }
  return r;
}

DecayScan barrier_b2_decay_check(const BarrierB2& b, const std::vector<double>& xs, std::size_t z_samples) {
  if (z_samples < 3) throw std::invalid_argument("need at least three z samples");
  DecayScan s{xs, {}, 0.0, 0.0, 4.0 * std::abs(b.boundary_value) / pi, 0.0, true};
  for (double x : xs) {
    double best = 0.0;
    for (std::size_t i = 0; i < z_samples; ++i) {
      const double z = static_cast<double>(i) / static_cast<double>(z_samples - 1);
      best = std::max(best, std::abs(barrier_b2_eval(b, x, z).value));
    }
    s.profile.push_back(best * std::exp(pi * x));
    if (s.profile.back() > s.scan_max) {
      s.scan_max = s.profile.back();
      s.argmax_x = x;
    }
  }
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (xs[i - 1] >= 0.5 && s.profile[i] < s.profile[i - 1] * (1.0 - 1e-12)) s.nondecreasing_tail = false;
  }
  s.c_bar = std::max(s.scan_max, s.asymptote);
  return s;
}

B2Grid barrier_b2_finite_difference(double h, double x_max, double boundary_value) {
  if (!(h > 0.0) || !(x_max > 0.0)) throw std::invalid_argument("spacing and length must be positive");
  const auto nz = static_cast<std::size_t>(std::llround(1.0 / h));
  const auto nx = static_cast<std::size_t>(std::llround(x_max / h));
  if (std::abs(nz * h - 1.0) > 1e-12 || std::abs(nx * h - x_max) > 1e-9 * x_max) {
    throw std::invalid_argument("spacing must divide both side lengths");
  }
  LayeredLaplace prob{{nz}, nx, std::vector<double>(nz - 1, boundary_value), std::vector<double>(nz - 1, 0.0)};
  const auto inner = solve_layered_laplace(prob);
  B2Grid g{h, nx, nz, std::vector<double>((nx + 1) * (nz + 1), 0.0)};
  for (std::size_t iz = 1; iz < nz; ++iz) g.values[iz] = boundary_value;
  for (std::size_t ix = 1; ix < nx; ++ix) {
    for (std::size_t iz = 1; iz < nz; ++iz) g.values[ix * (nz + 1) + iz] = inner[(ix - 1) * (nz - 1) + iz - 1];
  }
  return g;
}

B2OracleComparison barrier_b2_oracle_check(const BarrierB2& b, double h, double x_max) {
  const double steps = 0.125 / h;
  if (!(h > 0.0) || std::abs(steps - std::round(steps)) > 1e-9) throw std::invalid_argument("h must divide 1/8");
  const auto fine = barrier_b2_finite_difference(h, x_max, b.boundary_value);
  const auto coarse = barrier_b2_finite_difference(2.0 * h, x_max, b.boundary_value);
  const auto stride = static_cast<std::size_t>(std::llround(0.25 / h));
  // The oracle sets b2 = 0 at x = x_max; by the maximum principle that moves
  // the solution by at most the series' largest value on that edge.
  double truncation = 0.0;
  for (int iz = 1; iz < 64; ++iz) truncation = std::max(truncation, std::abs(barrier_b2_eval(b, x_max, iz / 64.0).value));
  B2OracleComparison out{h, 0.0, 0.0, 0.0, 0};
  for (std::size_t ix = stride; ix + stride <= fine.nx; ix += stride) {
    for (std::size_t iz = stride; iz + stride <= fine.nz; iz += stride) {
      const auto s = barrier_b2_eval(b, static_cast<double>(ix) * h, static_cast<double>(iz) * h);
      const double err = std::abs(s.value - fine.at(ix, iz));
      const double est = std::abs(fine.at(ix, iz) - coarse.at(ix / 2, iz / 2)) / 3.0;
      out.max_error = std::max(out.max_error, err);
      out.max_estimate = std::max(out.max_estimate, est);
      out.worst_ratio = std::max(out.worst_ratio, err / (est + s.tail_bound + truncation + 1e-300));
      ++out.points;
    }
  }
  return out;
}

std::size_t BarrierB1::index(const std::vector<std::size_t>& ix, std::size_t iz) const {
  std::size_t flat = iz;
  for (std::size_t a = 0; a < dim; ++a) flat = flat * (resolution + 1) + ix.at(a);
  return flat;
}

BarrierB1 solve_barrier_b1(std::size_t resolution, std::size_t dim) {
  if (dim < 1 || dim > 2) throw std::invalid_argument("b1 solver supports one or two horizontal dimensions");
  if (resolution < 32 || resolution % 4 != 0) {
    throw std::invalid_argument("resolution must be a multiple of 4 and at least 32");
  }
  const std::size_t r = resolution, nzi = resolution / 2;
  const double h = 8.0 / static_cast<double>(r);
  const std::vector<std::size_t> transverse(dim, r);
  std::size_t t = 1;
  for (std::size_t a = 0; a < dim; ++a) t *= r - 1;
  // w = 2 - b1 vanishes on the sides and the top and equals 2 at z = 0.
  LayeredLaplace prob{transverse, nzi, std::vector<double>(t, 2.0), std::vector<double>(t, 0.0)};
  const auto w = solve_layered_laplace(prob);

  BarrierB1 b{dim, r, h, {}, 0.0, 0.0, 0.0};
  std::size_t plane = 1;
  for (std::size_t a = 0; a < dim; ++a) plane *= r + 1;
  b.values.assign(plane * (nzi + 1), 2.0);
  for (std::size_t p = 0; p < plane; ++p) b.values[p] = 0.0;
  std::vector<std::size_t> ix(dim);
  for (std::size_t iz = 1; iz < nzi; ++iz) {
    for (std::size_t i = 0; i < t; ++i) {
      std::size_t rest = i;
      for (std::size_t a = dim; a-- > 0;) {
        ix[a] = rest % (r - 1) + 1;
        rest /= r - 1;
      }
      b.values[b.index(ix, iz)] = 2.0 - w[(iz - 1) * t + i];
    }
  }

  const std::size_t lo = r / 4, hi = 3 * r / 4, ztop = r / 4;
  b.max_inner = -std::numeric_limits<double>::infinity();
  for (std::size_t iz = 0; iz <= ztop; ++iz) {
    for (std::size_t p = 0; p < plane; ++p) {
      std::size_t rest = p;
      bool inside = true;
      for (std::size_t a = dim; a-- > 0;) {
        const std::size_t k = rest % (r + 1);
        rest /= r + 1;
        if (k < lo || k > hi) inside = false;
      }
      if (inside) b.max_inner = std::max(b.max_inner, b.values[iz * plane + p]);
    }
  }
  b.lambda = (2.0 - b.max_inner) / 4.0;

  // Discrete Laplacian (divided by h^2) over interior nodes.
  std::vector<std::size_t> stride(dim + 1);
  stride[dim] = 1;
  for (std::size_t a = dim; a-- > 0;) stride[a] = stride[a + 1] * (r + 1);
  // z is the slowest index, so its stride is the plane size.
  for (std::size_t iz = 1; iz < nzi; ++iz) {
    for (std::size_t i = 0; i < t; ++i) {
      std::size_t rest = i;
      for (std::size_t a = dim; a-- > 0;) {
        ix[a] = rest % (r - 1) + 1;
        rest /= r - 1;
      }
      const std::size_t c = b.index(ix, iz);
      double lap = b.values[c - plane] + b.values[c + plane] - 2.0 * static_cast<double>(dim + 1) * b.values[c];
      for (std::size_t a = 0; a < dim; ++a) lap += b.values[c - stride[a + 1]] + b.values[c + stride[a + 1]];
      b.residual = std::max(b.residual, std::abs(lap) / (h * h));
    }
  }
  return b;
}

namespace {

struct LogInequalities {
  double n, log_cbar, log_lambda, log_delta, log_m, log_c0, log_p;

  // Each returns rhs - lhs in log form; >= 0 means the inequality holds.
  double first(double k) const {
    const double expo = std::exp(k * (-std::log(2.0) - log_delta));  // 2^{-k} / delta^k
    return (log_lambda - (k + 2.0) * std::log(2.0)) - (std::log(n) + log_cbar - pi * expo);
  }
  double second(double k) const {
    return (log_lambda - (k + 2.0) * std::log(2.0)) - (-k * log_m - (k + 1.0) * log_delta + log_p);
  }
  double third(double k) const { return -k * log_m - (k * log_c0 - (1.0 + 1.0 / n) * (k - 3.0) * log_m); }
};

LogInequalities log_form(const ConstantsLedger& l) {
  return {static_cast<double>(l.dim), std::log(l.c_bar),  std::log(l.lambda),    std::log(l.delta),
          std::log(l.cap),            std::log(l.c0),     std::log(l.poisson_l2)};
}

}  // namespace

ConstantsLedger constants_ledger_build(double lambda, std::size_t dim, double energy_constant, double c_bar,
                                       std::optional<double> poisson_l2) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("lambda must lie in (0, 1)");
  if (dim < 1 || dim > 3) throw std::invalid_argument("dimension must be 1, 2 or 3");
  if (!(energy_constant > 0.0) || !(c_bar > 0.0)) throw std::invalid_argument("constants must be positive");
  ConstantsLedger l{};
  l.dim = dim;
  l.lambda = lambda;
  l.c_bar = c_bar;
  l.energy_constant = energy_constant;
  l.poisson_l2 = poisson_l2 ? *poisson_l2 : poisson_kernel_l2_norm(make_poisson_kernel(dim));
  const double n = static_cast<double>(dim);
  l.c0 = energy_constant * std::pow(2.0, 1.0 + 2.0 / n) / std::pow(lambda, 2.0 / n);

  l.delta = 0.0;
  for (int j = 250; j >= 1; --j) {
    const double d = 1e-3 * j;
    ConstantsLedger trial = l;
    trial.delta = d;
    trial.cap = 1.0;
    const auto f = log_form(trial);
    bool ok = true;
    for (int k = 1; k <= 64 && ok; ++k) ok = f.first(k) >= 0.0;
    if (ok) {
      l.delta = d;
      break;
    }
  }
  if (l.delta == 0.0) throw std::invalid_argument("no delta in (0, 1/4] satisfies the first inequality; lambda too small");
  l.cap = std::max({1.0, std::pow(l.c0, 2.0 * n), 2.0 / l.delta, 8.0 * l.poisson_l2 / (lambda * l.delta * l.delta)});
  return l;
}

LedgerVerification constants_ledger_verify(const ConstantsLedger& l, std::size_t k_max) {
  LedgerVerification v{};
  v.k_max = k_max;
  v.margin[0] = v.margin[1] = v.margin[2] = std::numeric_limits<double>::infinity();
  const auto f = log_form(l);
  for (std::size_t k = 1; k <= k_max; ++k) {
    const double kk = static_cast<double>(k);
    v.margin[0] = std::min(v.margin[0], f.first(kk));
    v.margin[1] = std::min(v.margin[1], f.second(kk));
  }
  v.third_from = 12 * l.dim;
  v.third_to = std::max(k_max, 24 * l.dim);
  for (std::size_t k = v.third_from; k <= v.third_to; ++k) v.margin[2] = std::min(v.margin[2], f.third(static_cast<double>(k)));
  // Relative slack for the log-domain rounding.
  v.first = v.margin[0] >= -1e-12;
  v.second = v.margin[1] >= -1e-12;
  v.third = v.margin[2] >= -1e-12;
  return v;
}

NodeField sample_nodes(std::size_t dim, std::size_t n, const std::function<double(const std::vector<double>&)>& f) {
  if (dim < 1 || dim > 3 || n < 2) throw std::invalid_argument("node grid needs dim in 1..3 and n >= 2");
  std::size_t total = 1;
  for (std::size_t a = 0; a < dim; ++a) total *= n + 1;
  NodeField out{dim, n, std::vector<double>(total)};
  const double h = out.spacing();
  std::vector<double> x(dim);
  for (std::size_t p = 0; p < total; ++p) {
    std::size_t rest = p;
    for (std::size_t a = dim; a-- > 0;) {
      x[a] = -1.0 + h * static_cast<double>(rest % (n + 1));
      rest /= n + 1;
    }
    out.values[p] = f(x);
  }
  return out;
}

IsoperimetricResult isoperimetric_check(const NodeField& w) {
  const std::size_t d = w.dim, n = w.n;
  std::size_t total = 1, cells = 1;
  for (std::size_t a = 0; a < d; ++a) {
    total *= n + 1;
    cells *= n;
  }
  if (w.values.size() != total) throw std::invalid_argument("node field has the wrong size");
  const double h = w.spacing();
  const double cell_vol = std::pow(h, static_cast<double>(d));
  const std::size_t corners = std::size_t{1} << d;
  // Two-point Gauss rule per axis integrates |grad|^2 of a multilinear function exactly.
  const double g0 = 0.5 - 0.5 / std::sqrt(3.0), g1 = 0.5 + 0.5 / std::sqrt(3.0);

  IsoperimetricResult r{};
  double grad2 = 0.0;
  std::vector<double> c(corners);
  std::vector<std::size_t> base(d);
  std::vector<double> q(d);
  for (std::size_t cell = 0; cell < cells; ++cell) {
    std::size_t rest = cell;
    for (std::size_t a = d; a-- > 0;) {
      base[a] = rest % n;
      rest /= n;
    }
    double avg = 0.0;
    for (std::size_t k = 0; k < corners; ++k) {
      std::size_t flat = 0;
      for (std::size_t a = 0; a < d; ++a) flat = flat * (n + 1) + base[a] + ((k >> (d - 1 - a)) & 1);
      c[k] = w.values[flat];
      avg += c[k];
    }
    avg /= static_cast<double>(corners);
    if (avg <= 0.0) {
      r.measure_below += cell_vol;
    } else if (avg >= 1.0) {
      r.measure_above += cell_vol;
    } else {
      r.measure_between += cell_vol;
    }
    for (std::size_t gp = 0; gp < corners; ++gp) {
      for (std::size_t a = 0; a < d; ++a) q[a] = ((gp >> (d - 1 - a)) & 1) ? g1 : g0;
      double s = 0.0;
      for (std::size_t a = 0; a < d; ++a) {
        double da = 0.0;
        for (std::size_t k = 0; k < corners; ++k) {
          double wgt = 1.0;
          for (std::size_t b = 0; b < d; ++b) {
            const bool hi = (k >> (d - 1 - b)) & 1;
            if (b == a) {
              wgt *= hi ? 1.0 : -1.0;
            } else {
              wgt *= hi ? q[b] : 1.0 - q[b];
            }
          }
          da += wgt * c[k];
        }
        da /= h;
        s += da * da;
      }
      grad2 += s * cell_vol / static_cast<double>(corners);
    }
  }
  r.gradient_norm = std::sqrt(grad2);
  r.lhs = r.measure_below * r.measure_above;
  r.rhs = r.gradient_norm * std::sqrt(r.measure_between);
  if (r.lhs == 0.0) {
    r.ratio = 0.0;
  } else if (r.rhs == 0.0) {
    r.ratio = std::numeric_limits<double>::infinity();
  } else {
    r.ratio = r.lhs / r.rhs;
  }
  return r;
}

std::vector<std::function<double(const std::vector<double>&)>> isoperimetric_corpus(std::size_t dim,
                                                                                     std::size_t count,
                                                                                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::function<double(const std::vector<double>&)>> out;
  for (std::size_t i = 0; i < count; ++i) {
    switch (i % 3) {
      case 0: {  // smooth random trigonometric field spanning roughly [-0.5, 1.5]
        struct Term {
          std::vector<double> k;
          double amp, phase;
        };
        std::vector<Term> terms;
        for (int t = 0; t < 6; ++t) {
          Term term{std::vector<double>(dim), 0.0, 0.0};
          double norm = 0.0;
          for (std::size_t a = 0; a < dim; ++a) {
            term.k[a] = pi * (u(rng) * 3.0 - 1.5);
            norm += term.k[a] * term.k[a];
          }
          term.amp = (u(rng) - 0.5) / (1.0 + 0.2 * norm);
          term.phase = 2.0 * pi * u(rng);
          terms.push_back(std::move(term));
        }
        double sum = 0.0;
        for (const auto& t : terms) sum += std::abs(t.amp);
        const double scale = 1.0 / std::max(sum, 1e-12);
        const double offset = 0.5 + 0.3 * (u(rng) - 0.5);
        out.emplace_back([terms, scale, offset](const std::vector<double>& x) {
          double s = 0.0;
          for (const auto& t : terms) {
            double ph = t.phase;
            for (std::size_t a = 0; a < x.size(); ++a) ph += t.k[a] * x[a];
            s += t.amp * std::cos(ph);
          }
          return offset + scale * s;
        });
        break;
      }
      case 1: {  // ramp clip((e.x - c) / width, 0, 1)
        std::vector<double> e(dim);
        double norm = 0.0;
        for (auto& v : e) {
          v = u(rng) - 0.5;
          norm += v * v;
        }
        double c = 0.8 * (u(rng) - 0.5);
        double width = 0.2 + 0.8 * u(rng);
        // The first ramps are the extreme members of the family: narrow and
        // centred, along each axis and along the diagonal. Width 1/4 puts the
        // axis-aligned kinks on nodes of every dyadic grid from n = 16 up.
        const std::size_t slot = i / 3;
        if (slot <= dim) {
          for (std::size_t a = 0; a < dim; ++a) e[a] = (slot == dim || slot == a) ? 1.0 : 0.0;
          norm = 0.0;
          for (double v : e) norm += v * v;
          width = 0.25;
          c = -0.5 * width;
        }
        norm = std::sqrt(std::max(norm, 1e-12));
        for (auto& v : e) v /= norm;
        out.emplace_back([e, c, width](const std::vector<double>& x) {
          double s = 0.0;
          for (std::size_t a = 0; a < x.size(); ++a) s += e[a] * x[a];
          return std::clamp((s - c) / width, 0.0, 1.0);
        });
        break;
      }
      default: {  // Gaussian bump rising from a negative floor
        std::vector<double> centre(dim);
        for (auto& v : centre) v = u(rng) - 0.5;
        const double width = 0.25 + 0.5 * u(rng);
        const double height = 1.5 + u(rng);
        const double floor = -0.2 - 0.3 * u(rng);
        out.emplace_back([centre, width, height, floor](const std::vector<double>& x) {
          double r2 = 0.0;
          for (std::size_t a = 0; a < x.size(); ++a) r2 += (x[a] - centre[a]) * (x[a] - centre[a]);
          return floor + height * std::exp(-r2 / (width * width));
        });
        break;
      }
    }
  }
  return out;
}

CorpusResult isoperimetric_sweep(std::size_t dim, std::size_t n,
                                 const std::vector<std::function<double(const std::vector<double>&)>>& corpus) {
  CorpusResult r{0.0, 0, {}};
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto res = isoperimetric_check(sample_nodes(dim, n, corpus[i]));
    r.ratios.push_back(res.ratio);
    if (res.ratio > r.max_ratio) {
      r.max_ratio = res.ratio;
      r.argmax = i;
    }
  }
  return r;
}

}  // namespace sqglab
