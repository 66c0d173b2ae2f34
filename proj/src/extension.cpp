#include "sqglab/extension.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "sqglab/fft.hpp"
#include "sqglab/spectral.hpp"

namespace sqglab {

namespace {

double norm3(const std::array<double, 3>& k) { return std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]); }

struct ThreePoint {
  double a, b, c;
};

// Weights for f'(z0) from samples at z0, z0 + h1, z0 + h1 + h2.
ThreePoint forward_weights(double h1, double h2) {
  return {-(2.0 * h1 + h2) / (h1 * (h1 + h2)), (h1 + h2) / (h1 * h2), -h1 / (h2 * (h1 + h2))};
}
// f'(z1) from z1 - h1, z1, z1 + h2.
ThreePoint central_weights(double h1, double h2) {
  return {-h2 / (h1 * (h1 + h2)), (h2 - h1) / (h1 * h2), h1 / (h2 * (h1 + h2))};
}
// f'(z2) from z2 - h1 - h2, z2 - h2, z2.
ThreePoint backward_weights(double h1, double h2) {
  return {h2 / (h1 * (h1 + h2)), -(h1 + h2) / (h1 * h2), (h1 + 2.0 * h2) / (h2 * (h1 + h2))};
}

// Composite Simpson on [a, b] with n (even) panels.
template <class Fn>
double simpson(Fn&& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

double sphere_area(std::size_t dim) {
  const double n = static_cast<double>(dim);
  return 2.0 * std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0);
}

void require_dim(std::size_t dim) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("Poisson kernel dimension must be 1, 2 or 3");
}

}  // namespace

ExtensionField::ExtensionField(Grid g, std::vector<double> z)
    : grid(std::move(g)), z_levels(std::move(z)), values(grid.total() * z_levels.size(), 0.0) {
  validate_z_levels(z_levels);
}

ExtensionField::ExtensionField(Grid g, std::vector<double> z, std::vector<double> v)
    : grid(std::move(g)), z_levels(std::move(z)), values(std::move(v)) {
  validate_z_levels(z_levels);
  if (values.size() != grid.total() * z_levels.size()) throw std::invalid_argument("extension field size mismatch");
}

std::span<double> ExtensionField::level(std::size_t iz) {
  return std::span<double>(values).subspan(iz * grid.total(), grid.total());
}

std::span<const double> ExtensionField::level(std::size_t iz) const {
  return std::span<const double>(values).subspan(iz * grid.total(), grid.total());
}

PhysicalField ExtensionField::level_field(std::size_t iz) const {
  auto l = level(iz);
  return PhysicalField(grid, std::vector<double>(l.begin(), l.end()));
}

void validate_z_levels(std::span<const double> z) {
  if (z.empty() || z[0] != 0.0) throw std::invalid_argument("z levels must start at 0");
  for (std::size_t i = 1; i < z.size(); ++i) {
    if (!std::isfinite(z[i]) || z[i] < 0.0) {
      throw std::invalid_argument("z levels must be finite and non-negative, level " + std::to_string(i) + " is " +
                                  std::to_string(z[i]));
    }
    if (!(z[i] > z[i - 1])) throw std::invalid_argument("z levels must be strictly increasing");
  }
}

std::vector<double> default_z_levels(double dz_min, double z_max, std::size_t count) {
  if (count < 3 || !(dz_min > 0.0) || !(z_max > dz_min * static_cast<double>(count - 1))) {
    throw std::invalid_argument("default_z_levels: need count >= 3 and z_max > dz_min * (count - 1)");
  }
  const double n = static_cast<double>(count - 1);
  auto span = [&](double r) { return dz_min * (std::pow(r, n) - 1.0) / (r - 1.0); };
  double lo = 1.0 + 1e-14, hi = 2.0;
  while (span(hi) < z_max) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (span(mid) < z_max ? lo : hi) = mid;
  }
  const double r = 0.5 * (lo + hi);
  std::vector<double> z(count, 0.0);
  double dz = dz_min;
  for (std::size_t i = 1; i < count; ++i, dz *= r) z[i] = z[i - 1] + dz;
  z.back() = z_max;
  return z;
}

std::vector<double> uniform_z_levels(double h, std::size_t count) {
  if (!(h > 0.0) || count < 1) throw std::invalid_argument("uniform_z_levels: need h > 0");
  std::vector<double> z(count);
  for (std::size_t i = 0; i < count; ++i) z[i] = h * static_cast<double>(i);
  return z;
}

ExtensionField harmonic_extension(const SpectralField& theta_hat, std::span<const double> z_levels) {
  validate_z_levels(z_levels);
  ExtensionField ext(theta_hat.grid, std::vector<double>(z_levels.begin(), z_levels.end()));
  std::vector<double> kmag(theta_hat.grid.total());
  for_each_mode(theta_hat.grid, [&](std::size_t flat, const auto& k, const auto&, const auto&) { kmag[flat] = norm3(k); });
  for (std::size_t iz = 0; iz < z_levels.size(); ++iz) {
    SpectralField lvl(theta_hat.grid);
    const double z = z_levels[iz];
    for (std::size_t i = 0; i < kmag.size(); ++i) lvl.coeffs[i] = theta_hat.coeffs[i] * std::exp(-kmag[i] * z);
    const auto phys = inverse(lvl);
    std::copy(phys.values.begin(), phys.values.end(), ext.level(iz).begin());
  }
  return ext;
}

ExtensionField harmonic_extension(const PhysicalField& theta, std::span<const double> z_levels) {
  auto ext = harmonic_extension(forward(theta), z_levels);
  // The z = 0 slice is the boundary data itself, not its round trip.
  std::copy(theta.values.begin(), theta.values.end(), ext.level(0).begin());
  return ext;
}

PhysicalField normal_derivative_at_boundary(const ExtensionField& ext) {
  if (ext.levels() < 3) {
    throw std::invalid_argument("normal derivative needs at least 3 z levels, got " + std::to_string(ext.levels()));
  }
  const auto w = forward_weights(ext.z_levels[1], ext.z_levels[2] - ext.z_levels[1]);
  PhysicalField out(ext.grid);
  auto f0 = ext.level(0), f1 = ext.level(1), f2 = ext.level(2);
  for (std::size_t i = 0; i < out.size(); ++i) out.values[i] = -(w.a * f0[i] + w.b * f1[i] + w.c * f2[i]);
  return out;
}

ExtensionField z_derivative(const ExtensionField& ext) {
  const std::size_t nz = ext.levels();
  if (nz < 3) throw std::invalid_argument("z derivative needs at least 3 levels");
  ExtensionField d(ext.grid, ext.z_levels);
  const auto& z = ext.z_levels;
  for (std::size_t iz = 0; iz < nz; ++iz) {
    std::size_t base;
    ThreePoint w;
    if (iz == 0) {
      base = 0;
      w = forward_weights(z[1] - z[0], z[2] - z[1]);
    } else if (iz == nz - 1) {
      base = nz - 3;
      w = backward_weights(z[nz - 2] - z[nz - 3], z[nz - 1] - z[nz - 2]);
    } else {
      base = iz - 1;
      w = central_weights(z[iz] - z[iz - 1], z[iz + 1] - z[iz]);
    }
    auto a = ext.level(base), b = ext.level(base + 1), c = ext.level(base + 2);
    auto out = d.level(iz);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = w.a * a[i] + w.b * b[i] + w.c * c[i];
  }
  return d;
}

double integrate_extension(const Grid& grid, std::span<const double> z, std::span<const double> integrand) {
  const std::size_t n = grid.total();
  std::vector<double> per_level(z.size(), 0.0);
  for (std::size_t iz = 0; iz < z.size(); ++iz) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += integrand[iz * n + i];
    per_level[iz] = s * grid.cell_volume();
  }
  double total = 0.0;
  for (std::size_t iz = 1; iz < z.size(); ++iz) total += 0.5 * (z[iz] - z[iz - 1]) * (per_level[iz] + per_level[iz - 1]);
  return total;
}

namespace {

// Per-level x-gradients, z-major, one block per axis.
std::vector<std::vector<double>> x_gradients(const ExtensionField& ext) {
  const std::size_t n = ext.grid.total();
  std::vector<std::vector<double>> g(ext.grid.dim(), std::vector<double>(n * ext.levels()));
  for (std::size_t iz = 0; iz < ext.levels(); ++iz) {
    const auto hat = forward(ext.level_field(iz));
    for (std::size_t a = 0; a < ext.grid.dim(); ++a) {
      const auto d = inverse(derivative(hat, a));
      std::copy(d.values.begin(), d.values.end(), g[a].begin() + static_cast<std::ptrdiff_t>(iz * n));
    }
  }
  return g;
}

void check_cutoff(const ExtensionField& ext, const ExtensionField& cutoff) {
  if (!(cutoff.grid == ext.grid) || cutoff.z_levels != ext.z_levels) {
    throw std::invalid_argument("cutoff must share the extension's grid and z levels");
  }
  double peak = 0.0, top = 0.0;
  for (double v : cutoff.values) peak = std::max(peak, std::abs(v));
  for (double v : cutoff.level(cutoff.levels() - 1)) top = std::max(top, std::abs(v));
  if (top > 1e-12 * std::max(peak, 1.0)) {
    throw std::invalid_argument("cutoff is not supported inside the z range (|eta| = " + std::to_string(top) +
                                " on the top level)");
  }
}

}  // namespace

double extension_dirichlet_energy(const ExtensionField& ext, const std::optional<ExtensionField>& cutoff) {
  if (cutoff) check_cutoff(ext, *cutoff);
  const std::size_t dim = ext.grid.dim();
  const auto gx = x_gradients(ext);
  const auto gz = z_derivative(ext);
  std::vector<std::vector<double>> ex;
  std::optional<ExtensionField> ez;
  if (cutoff) {
    ex = x_gradients(*cutoff);
    ez = z_derivative(*cutoff);
  }
  std::vector<double> integrand(ext.values.size(), 0.0);
  for (std::size_t p = 0; p < integrand.size(); ++p) {
    const double th = ext.values[p];
    if (th <= 0.0) continue;
    const double eta = cutoff ? cutoff->values[p] : 1.0;
    double s = 0.0;
    for (std::size_t a = 0; a < dim; ++a) {
      const double g = eta * gx[a][p] + (cutoff ? th * ex[a][p] : 0.0);
      s += g * g;
    }
    const double g = eta * gz.values[p] + (cutoff ? th * ez->values[p] : 0.0);
    integrand[p] = s + g * g;
  }
  return integrate_extension(ext.grid, ext.z_levels, integrand);
}

double extension_cutoff_gradient_energy(const ExtensionField& ext, const ExtensionField& cutoff) {
  check_cutoff(ext, cutoff);
  const auto ex = x_gradients(cutoff);
  const auto ez = z_derivative(cutoff);
  std::vector<double> integrand(ext.values.size(), 0.0);
  for (std::size_t p = 0; p < integrand.size(); ++p) {
    const double th = std::max(ext.values[p], 0.0);
    double g2 = ez.values[p] * ez.values[p];
    for (const auto& c : ex) g2 += c[p] * c[p];
    integrand[p] = g2 * th * th;
  }
  return integrate_extension(ext.grid, ext.z_levels, integrand);
}

double poisson_unit_mass_integral(std::size_t dim) {
  require_dim(dim);
  const double e = static_cast<double>(dim) - 1.0;
  const double radial = simpson([&](double phi) { return std::pow(std::sin(phi), e); }, 0.0, std::numbers::pi / 2.0, 4000);
  return sphere_area(dim) * radial;
}

double poisson_normalization_closed_form(std::size_t dim) {
  require_dim(dim);
  const double h = (static_cast<double>(dim) + 1.0) / 2.0;
  return std::tgamma(h) / std::pow(std::numbers::pi, h);
}

PoissonKernelSpec make_poisson_kernel(std::size_t dim) {
  PoissonKernelSpec spec{dim, 1.0 / poisson_unit_mass_integral(dim)};
  const double closed = poisson_normalization_closed_form(dim);
  if (std::abs(spec.normalization - closed) > 1e-10 * closed) {
    throw std::logic_error("Poisson kernel normalisation quadrature disagrees with the closed form");
  }
  return spec;
}

double poisson_kernel_l2_norm(const PoissonKernelSpec& spec) {
  require_dim(spec.dim);
  const double n = static_cast<double>(spec.dim);
  const double radial = simpson([&](double phi) { return std::pow(std::sin(phi), n - 1.0) * std::pow(std::cos(phi), n + 1.0); },
                                0.0, std::numbers::pi / 2.0, 4000);
  return spec.normalization * std::sqrt(sphere_area(spec.dim) * radial);
}

double poisson_kernel_eval(const PoissonKernelSpec& spec, double t, std::span<const double> x) {
  if (!(t > 0.0)) throw std::invalid_argument("Poisson kernel needs t > 0, got " + std::to_string(t));
  if (x.size() != spec.dim) throw std::invalid_argument("Poisson kernel point has wrong dimension");
  double r2 = 0.0;
  for (double xi : x) r2 += xi * xi;
  return spec.normalization * t / std::pow(r2 + t * t, (static_cast<double>(spec.dim) + 1.0) / 2.0);
}

PhysicalField poisson_convolve(const PhysicalField& theta, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("poisson_convolve needs t > 0, got " + std::to_string(t));
  auto hat = forward(theta);
  for_each_mode(theta.grid, [&](std::size_t flat, const auto& k, const auto&, const auto&) {
    hat.coeffs[flat] *= std::exp(-norm3(k) * t);
  });
  auto r = inverse(hat);
  r.time_tag = theta.time_tag;
  return r;
}

PhysicalField poisson_convolve_direct(const PhysicalField& theta, double t, int image_radius) {
  if (!(t > 0.0)) throw std::invalid_argument("poisson_convolve_direct needs t > 0");
  const Grid& g = theta.grid;
  const auto spec = make_poisson_kernel(g.dim());
  const std::size_t dim = g.dim();
  const int span = 2 * image_radius + 1;
  int images = 1;
  for (std::size_t a = 0; a < dim; ++a) images *= span;
  PhysicalField out(g);
  std::array<double, 3> d{};
  for (std::size_t i = 0; i < g.total(); ++i) {
    const auto xi = g.unflat(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < g.total(); ++j) {
      const auto yj = g.unflat(j);
      for (int im = 0; im < images; ++im) {
        int rest = im;
        for (std::size_t a = 0; a < dim; ++a) {
          const int n = rest % span - image_radius;
          rest /= span;
          d[a] = (static_cast<double>(xi[a]) - static_cast<double>(yj[a])) * g.spacing(a) - n * g.length(a);
        }
        acc += poisson_kernel_eval(spec, t, std::span<const double>(d.data(), dim)) * theta.values[j];
      }
    }
    out.values[i] = acc * g.cell_volume();
  }
  return out;
}

}  // namespace sqglab
