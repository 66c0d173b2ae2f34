#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "sqglab/extension.hpp"
#include "sqglab/fft.hpp"
#include "sqglab/spectral.hpp"

using namespace sqglab;
using testutil::max_abs;
using testutil::max_abs_diff;
using testutil::random_trig;

TEST_CASE("z levels validation and defaults") {
  CHECK_THROWS_AS(validate_z_levels(std::vector<double>{0.0, -0.1}), std::invalid_argument);
  CHECK_THROWS_AS(validate_z_levels(std::vector<double>{0.1, 0.2}), std::invalid_argument);
  CHECK_THROWS_AS(validate_z_levels(std::vector<double>{0.0, 0.2, 0.2}), std::invalid_argument);
  const auto z = default_z_levels();
  REQUIRE(z.size() == 64);
  CHECK(z[0] == 0.0);
  CHECK(z[1] == doctest::Approx(1e-3));
  CHECK(z.back() == doctest::Approx(8.0));
  validate_z_levels(z);
  // Geometric spacing: constant ratio of consecutive gaps.
  const double r = (z[2] - z[1]) / (z[1] - z[0]);
  for (std::size_t i = 2; i + 1 < z.size(); ++i) CHECK((z[i + 1] - z[i]) / (z[i] - z[i - 1]) == doctest::Approx(r));
}

TEST_CASE("extension of single modes and constants") {
  Grid g({32, 32});
  const auto z = default_z_levels();
  const auto s = sample(g, [](const auto& x) { return std::sin(x[0]); });
  const auto ext = harmonic_extension(s, z);
  for (std::size_t iz = 0; iz < z.size(); ++iz) CHECK(max_abs_diff(ext.level_field(iz), std::exp(-z[iz]) * s) < 1e-13);
  PhysicalField c(g, std::vector<double>(g.total(), -1.25));
  const auto ec = harmonic_extension(c, z);
  for (double v : ec.values) CHECK(v == doctest::Approx(-1.25).epsilon(1e-14));
  // The z = 0 slice is the input itself.
  const auto f = random_trig(g, 4, 6);
  const auto ef = harmonic_extension(f, z);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(ef.level(0)[i] == f[i]);
}

TEST_CASE("extension is discretely harmonic at second order in dz") {
  Grid g({32, 32});
  const auto f = random_trig(g, 7, 4);
  std::vector<double> res;
  for (double h : {0.04, 0.02, 0.01}) {
    const auto z = uniform_z_levels(h, 3);
    const auto ext = harmonic_extension(f, z);
    const auto lap_x = fractional_laplacian(ext.level_field(1), 2.0);  // -Delta_x
    double worst = 0.0;
    for (std::size_t i = 0; i < g.total(); ++i) {
      const double dzz = (ext.level(2)[i] - 2.0 * ext.level(1)[i] + ext.level(0)[i]) / (h * h);
      worst = std::max(worst, std::abs(dzz - lap_x[i]));
    }
    res.push_back(worst);
  }
  CHECK(std::log2(res[0] / res[1]) > 1.8);
  CHECK(std::log2(res[1] / res[2]) > 1.8);
}

TEST_CASE("normal derivative realises Lambda") {
  Grid g({32, 32});
  const auto s = sample(g, [](const auto& x) { return std::sin(x[0]); });
  const double h = 1e-3;
  const auto d = normal_derivative_at_boundary(harmonic_extension(s, uniform_z_levels(h, 3)));
  CHECK(max_abs_diff(d, s) < 2.0 * h * h);
  PhysicalField c(g, std::vector<double>(g.total(), 2.0));
  CHECK(max_abs(normal_derivative_at_boundary(harmonic_extension(c, uniform_z_levels(h, 3)))) < 1e-10);
  CHECK_THROWS_AS(normal_derivative_at_boundary(harmonic_extension(c, uniform_z_levels(h, 2))), std::invalid_argument);

  const auto f = random_trig(g, 12, 5);
  const auto lam = fractional_laplacian(f, 1.0);
  double prev = 0.0;
  for (double dz : {0.02, 0.01, 0.005}) {
    const double err = max_abs_diff(normal_derivative_at_boundary(harmonic_extension(f, uniform_z_levels(dz, 3))), lam);
    if (prev > 0.0) CHECK(std::log2(prev / err) > 1.8);
    prev = err;
  }
}

TEST_CASE("maximum principle across levels") {
  Grid g({32, 32});
  const auto f = random_trig(g, 21, 6);
  const double lo = *std::min_element(f.values.begin(), f.values.end());
  const double hi = *std::max_element(f.values.begin(), f.values.end());
  const auto ext = harmonic_extension(f, default_z_levels());
  double prev_l2 = INFINITY;
  for (std::size_t iz = 0; iz < ext.levels(); ++iz) {
    for (double v : ext.level(iz)) {
      CHECK(v >= lo - 1e-10);
      CHECK(v <= hi + 1e-10);
    }
    const double l2 = l2_norm(ext.level_field(iz));
    CHECK(l2 <= prev_l2 + 1e-14);
    prev_l2 = l2;
  }
}

TEST_CASE("Poisson kernel normalisation and homogeneity") {
  for (std::size_t n = 1; n <= 3; ++n) {
    const auto spec = make_poisson_kernel(n);
    CHECK(spec.normalization == doctest::Approx(poisson_normalization_closed_form(n)).epsilon(1e-12));
  }
  CHECK(poisson_normalization_closed_form(1) == doctest::Approx(1.0 / std::numbers::pi));
  CHECK(poisson_normalization_closed_form(2) == doctest::Approx(1.0 / (2.0 * std::numbers::pi)));
  // ||P(1)||^2 in 2D is 1/(8 pi) by a direct polar integral.
  CHECK(poisson_kernel_l2_norm(make_poisson_kernel(2)) == doctest::Approx(std::sqrt(1.0 / (8.0 * std::numbers::pi))));

  // Mass of P(1, x) in 1D by truncated quadrature plus the analytic tail 2/(pi R).
  const auto p1 = make_poisson_kernel(1);
  const double R = 2000.0;
  const int cells = 2'000'000;
  double mass = 0.0;
  for (int i = 0; i < cells; ++i) {
    const double x = -R + (i + 0.5) * (2.0 * R / cells);
    mass += poisson_kernel_eval(p1, 1.0, std::span<const double>(&x, 1));
  }
  mass *= 2.0 * R / cells;
  CHECK(std::abs(mass + 2.0 / (std::numbers::pi * R) - 1.0) < 1e-6);

  const auto p = make_poisson_kernel(2);
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 50; ++i) {
    const double t = std::abs(u(rng)) + 0.1;
    const double lam = std::abs(u(rng)) + 0.5;
    const std::array<double, 2> x{u(rng), u(rng)};
    const std::array<double, 2> lx{lam * x[0], lam * x[1]};
    const double a = poisson_kernel_eval(p, lam * t, lx);
    const double b = std::pow(lam, -2.0) * poisson_kernel_eval(p, t, x);
    CHECK(a == doctest::Approx(b).epsilon(1e-14));
    CHECK(b > 0.0);
  }
  const std::array<double, 2> o{0.0, 0.0};
  CHECK_THROWS_AS(poisson_kernel_eval(p, 0.0, o), std::invalid_argument);
}

TEST_CASE("Poisson convolution") {
  Grid g({32, 32});
  PhysicalField c(g, std::vector<double>(g.total(), 0.75));
  CHECK(max_abs_diff(poisson_convolve(c, 0.3), c) < 1e-14);
  CHECK_THROWS_AS(poisson_convolve(c, 0.0), std::invalid_argument);
  const auto f = random_trig(g, 2, 8);
  const auto st = poisson_convolve(poisson_convolve(f, 0.2), 0.5);
  CHECK(max_abs_diff(st, poisson_convolve(f, 0.7)) < 1e-12);
  // Matches the harmonic extension level at height t.
  const std::vector<double> z{0.0, 0.4};
  CHECK(max_abs_diff(harmonic_extension(f, z).level_field(1), poisson_convolve(f, 0.4)) < 1e-13);

  Grid line({32});
  const auto h = random_trig(line, 5, 4, true);
  const auto direct = poisson_convolve_direct(h, 0.5, 400);
  CHECK(max_abs_diff(direct, poisson_convolve(h, 0.5)) < 1e-5);
}

TEST_CASE("Dirichlet energy of the truncated extension") {
  Grid line({256});
  const auto z = uniform_z_levels(0.01, 401);
  PhysicalField neg(line, std::vector<double>(line.total(), -1.0));
  CHECK(extension_dirichlet_energy(harmonic_extension(neg, z)) == 0.0);

  // Half-cell phase shift keeps grid points off the zero set.
  const double phase = 0.5 * line.spacing(0);
  const auto s = sample(line, [&](const auto& x) { return std::sin(x[0] - phase); });
  const auto ext = harmonic_extension(s, z);
  const double top = z.back();
  // The positive part lives on half the period, where |grad|^2 = e^{-2z}.
  const double closed = std::numbers::pi * 0.5 * (1.0 - std::exp(-2.0 * top));
  CHECK(extension_dirichlet_energy(ext) == doctest::Approx(closed).epsilon(1e-4));
}

TEST_CASE("cutoff energy decomposes into the chain-rule terms") {
  Grid g({32, 32});
  const auto f = random_trig(g, 3, 4);
  const auto z = uniform_z_levels(0.02, 101);
  const auto ext = harmonic_extension(f, z);
  ExtensionField eta(g, z);
  for (std::size_t iz = 0; iz < z.size(); ++iz) {
    const auto lvl = sample(g, [&](const auto& x) { return (1.0 + 0.5 * std::cos(x[0]) * std::sin(x[1])) * std::cos(std::numbers::pi * z[iz] / 4.0); });
    std::copy(lvl.values.begin(), lvl.values.end(), eta.level(iz).begin());
  }
  const double full = extension_dirichlet_energy(ext, eta);
  const double grad_eta = extension_cutoff_gradient_energy(ext, eta);

  // Independent assembly of the eta^2 |grad theta*|^2 and cross terms.
  const auto ez = z_derivative(eta);
  const auto tz = z_derivative(ext);
  std::vector<double> main_term(ext.values.size(), 0.0), cross(ext.values.size(), 0.0);
  const std::size_t n = g.total();
  for (std::size_t iz = 0; iz < z.size(); ++iz) {
    const auto gt = gradient(ext.level_field(iz));
    const auto ge = gradient(eta.level_field(iz));
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t p = iz * n + i;
      if (ext.values[p] <= 0.0) continue;
      const double e = eta.values[p];
      double tt = tz.values[p] * tz.values[p], te = tz.values[p] * ez.values[p];
      for (std::size_t a = 0; a < 2; ++a) {
        tt += gt[a][i] * gt[a][i];
        te += gt[a][i] * ge[a][i];
      }
      main_term[p] = e * e * tt;
      cross[p] = 2.0 * e * ext.values[p] * te;
    }
  }
  const double m = integrate_extension(g, z, main_term);
  const double c = integrate_extension(g, z, cross);
  CHECK(full == doctest::Approx(m + c + grad_eta).epsilon(1e-12));
  CHECK(full >= 0.0);

  ExtensionField bad(g, z, std::vector<double>(ext.values.size(), 1.0));
  CHECK_THROWS_AS(extension_dirichlet_energy(ext, bad), std::invalid_argument);
}

TEST_CASE("trace inequality holds with equality for eta = 1") {
  // For the extension of a positive-part-free field (theta > 0 everywhere)
  // int |grad theta*|^2 = ||Lambda^{1/2} theta||^2 up to the z truncation.
  Grid g({32, 32});
  auto f = random_trig(g, 8, 3, true);
  const auto z = default_z_levels(1e-3, 12.0, 400);
  const auto ext = harmonic_extension(add_constant(f, 10.0), z);
  const double energy = extension_dirichlet_energy(ext);
  const double trace = h_half_seminorm(forward(f));
  CHECK(energy == doctest::Approx(trace).epsilon(2e-3));
}
