#include "sqglab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "sqglab/fft.hpp"

namespace sqglab {

namespace {

double norm3(const std::array<double, 3>& k) { return std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]); }

void require_same_grid(const PhysicalField& a, const PhysicalField& b) {
  if (!(a.grid == b.grid)) throw std::invalid_argument("fields live on different grids");
}

}  // namespace

SpectralField apply_multiplier(
    const SpectralField& f,
    const std::function<std::complex<double>(const std::array<double, 3>&, const std::array<int, 3>&)>& symbol) {
  SpectralField out(f.grid);
  for_each_mode(f.grid, [&](std::size_t flat, const auto& k, const auto& m, const auto&) {
    out.coeffs[flat] = symbol(k, m) * f.coeffs[flat];
  });
  return out;
}

SpectralField fractional_laplacian(const SpectralField& f, double beta) {
  if (!(beta >= 0.0 && beta <= 2.0)) {
    throw std::invalid_argument("fractional_laplacian: beta must lie in [0, 2], got " + std::to_string(beta));
  }
  SpectralField out(f.grid);
  if (beta == 0.0) return f;
  for_each_mode(f.grid, [&](std::size_t flat, const auto& k, const auto&, const auto&) {
    const double kk = norm3(k);
    const double sym = beta == 1.0 ? kk : (beta == 2.0 ? kk * kk : std::pow(kk, beta));
    out.coeffs[flat] = sym * f.coeffs[flat];
  });
  return out;
}

PhysicalField fractional_laplacian(const PhysicalField& f, double beta) {
  auto r = inverse(fractional_laplacian(forward(f), beta));
  r.time_tag = f.time_tag;
  return r;
}

SpectralField riesz_transform(const SpectralField& f, std::size_t axis) {
  if (axis >= f.grid.dim()) {
    throw std::invalid_argument("riesz_transform: axis " + std::to_string(axis) + " invalid for a " +
                                std::to_string(f.grid.dim()) + "D grid");
  }
  SpectralField out(f.grid);
  for_each_mode(f.grid, [&](std::size_t flat, const auto& k, const auto&, const auto& idx) {
    const double kk = norm3(k);
    if (kk == 0.0 || f.grid.is_nyquist(axis, idx[axis])) return;
    out.coeffs[flat] = std::complex<double>(0.0, k[axis] / kk) * f.coeffs[flat];
  });
  return out;
}

SpectralField derivative(const SpectralField& f, std::size_t axis) {
  if (axis >= f.grid.dim()) throw std::invalid_argument("derivative: invalid axis " + std::to_string(axis));
  SpectralField out(f.grid);
  for_each_mode(f.grid, [&](std::size_t flat, const auto& k, const auto&, const auto& idx) {
    if (f.grid.is_nyquist(axis, idx[axis])) return;
    out.coeffs[flat] = std::complex<double>(0.0, k[axis]) * f.coeffs[flat];
  });
  return out;
}

VectorField gradient(const PhysicalField& f) {
  const auto hat = forward(f);
  VectorField g;
  for (std::size_t a = 0; a < f.grid.dim(); ++a) g.push_back(inverse(derivative(hat, a)));
  return g;
}

PhysicalField divergence(const VectorField& v) {
  if (v.empty()) throw std::invalid_argument("divergence: empty vector field");
  const Grid& grid = v.front().grid;
  if (v.size() != grid.dim()) throw std::invalid_argument("divergence: component count must equal grid dimension");
  SpectralField acc(grid);
  for (std::size_t a = 0; a < v.size(); ++a) {
    const auto d = derivative(forward(v[a]), a);
    for (std::size_t i = 0; i < acc.coeffs.size(); ++i) acc.coeffs[i] += d.coeffs[i];
  }
  return inverse(acc);
}

SpectralField dealias(const SpectralField& f) {
  SpectralField out = f;
  for_each_mode(f.grid, [&](std::size_t flat, const auto&, const auto& m, const auto&) {
    for (std::size_t a = 0; a < f.grid.dim(); ++a) {
      if (3 * std::abs(m[a]) > static_cast<int>(f.grid.size(a))) {
        out.coeffs[flat] = 0.0;
        return;
      }
    }
  });
  return out;
}

bool is_dealiased(const SpectralField& f, double tol) {
  bool ok = true;
  for_each_mode(f.grid, [&](std::size_t flat, const auto&, const auto& m, const auto&) {
    for (std::size_t a = 0; a < f.grid.dim(); ++a) {
      if (3 * std::abs(m[a]) > static_cast<int>(f.grid.size(a)) && std::abs(f.coeffs[flat]) > tol) ok = false;
    }
  });
  return ok;
}

double sobolev_seminorm_sq(const SpectralField& f, double s) {
  double acc = 0.0;
  for_each_mode(f.grid, [&](std::size_t flat, const auto& k, const auto&, const auto&) {
    const double kk = norm3(k);
    if (kk == 0.0) return;
    const double w = s == 0.5 ? kk : std::pow(kk, 2.0 * s);
    acc += w * std::norm(f.coeffs[flat]);
  });
  return acc * f.grid.volume();
}

double h_half_seminorm(const SpectralField& f) { return sobolev_seminorm_sq(f, 0.5); }

double integral(const PhysicalField& f) {
  double s = 0.0;
  for (double v : f.values) s += v;
  return s * f.grid.cell_volume();
}

double mean(const PhysicalField& f) { return integral(f) / f.grid.volume(); }

double l2_norm_sq(const PhysicalField& f) {
  double s = 0.0;
  for (double v : f.values) s += v * v;
  return s * f.grid.cell_volume();
}

double l2_norm(const PhysicalField& f) { return std::sqrt(l2_norm_sq(f)); }

double linf_norm(const PhysicalField& f) {
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::abs(v));
  return m;
}

double linf_norm(const VectorField& v) {
  if (v.empty()) return 0.0;
  double m = 0.0;
  for (std::size_t i = 0; i < v.front().size(); ++i) {
    double s = 0.0;
    for (const auto& c : v) s += c.values[i] * c.values[i];
    m = std::max(m, s);
  }
  return std::sqrt(m);
}

double inner(const PhysicalField& a, const PhysicalField& b) {
  require_same_grid(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a.values[i] * b.values[i];
  return s * a.grid.cell_volume();
}

double l2_norm_sq(const SpectralField& f) {
  double s = 0.0;
  for (const auto& c : f.coeffs) s += std::norm(c);
  return s * f.grid.volume();
}

double conjugate_symmetry_defect(const SpectralField& f) {
  double worst = 0.0;
  for (std::size_t i = 0; i < f.coeffs.size(); ++i) {
    auto idx = f.grid.unflat(i);
    for (std::size_t a = 0; a < f.grid.dim(); ++a) idx[a] = (f.grid.size(a) - idx[a]) % f.grid.size(a);
    worst = std::max(worst, std::abs(f.coeffs[i] - std::conj(f.coeffs[f.grid.flat(idx)])));
  }
  return worst;
}

void require_finite(const PhysicalField& f, const char* what) {
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!std::isfinite(f.values[i])) {
      throw std::invalid_argument(std::string(what) + ": non-finite value at index " + std::to_string(i));
    }
  }
}

PhysicalField operator+(const PhysicalField& a, const PhysicalField& b) {
  require_same_grid(a, b);
  PhysicalField r = a;
  for (std::size_t i = 0; i < r.size(); ++i) r.values[i] += b.values[i];
  return r;
}

PhysicalField operator-(const PhysicalField& a, const PhysicalField& b) {
  require_same_grid(a, b);
  PhysicalField r = a;
  for (std::size_t i = 0; i < r.size(); ++i) r.values[i] -= b.values[i];
  return r;
}

PhysicalField operator*(double s, const PhysicalField& a) {
  PhysicalField r = a;
  for (auto& v : r.values) v *= s;
  return r;
}

PhysicalField add_constant(const PhysicalField& a, double c) {
  PhysicalField r = a;
  for (auto& v : r.values) v += c;
  return r;
}

}  // namespace sqglab
