#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "sqglab/fft.hpp"
#include "sqglab/spectral.hpp"

using namespace sqglab;
using testutil::max_abs_diff;
using testutil::random_trig;

TEST_CASE("fractional laplacian eigenfunctions") {
  Grid g({32, 32});
  const auto s1 = sample(g, [](const auto& x) { return std::sin(x[0]); });
  CHECK(max_abs_diff(fractional_laplacian(s1, 1.0), s1) < 1e-13);
  const auto s2 = sample(g, [](const auto& x) { return std::sin(2.0 * x[0]); });
  CHECK(max_abs_diff(fractional_laplacian(s2, 2.0), 4.0 * s2) < 1e-12);
  // Physical wavevector depends on the domain length.
  Grid h({32}, {1.0});
  const auto s3 = sample(h, [](const auto& x) { return std::cos(2.0 * std::numbers::pi * 3.0 * x[0]); });
  CHECK(max_abs_diff(fractional_laplacian(s3, 0.5), std::sqrt(6.0 * std::numbers::pi) * s3) < 1e-12);
}

TEST_CASE("fractional laplacian constants and beta range") {
  Grid g({16, 16});
  PhysicalField c(g, std::vector<double>(g.total(), 3.0));
  CHECK(testutil::max_abs(fractional_laplacian(c, 1.0)) < 1e-14);
  CHECK(max_abs_diff(fractional_laplacian(c, 0.0), c) < 1e-14);
  CHECK_THROWS_AS(fractional_laplacian(c, 2.5), std::invalid_argument);
  CHECK_THROWS_AS(fractional_laplacian(c, -0.1), std::invalid_argument);
}

TEST_CASE("semigroup property of Lambda^beta") {
  Grid g({32, 32});
  for (unsigned seed = 0; seed < 5; ++seed) {
    const auto f = random_trig(g, seed, 6);
    const auto twice = fractional_laplacian(fractional_laplacian(f, 1.0), 1.0);
    const auto once = fractional_laplacian(f, 2.0);
    CHECK(max_abs_diff(twice, once) < 1e-12 * std::max(1.0, testutil::max_abs(once)));
    const auto a = fractional_laplacian(fractional_laplacian(f, 0.3), 0.9);
    const auto b = fractional_laplacian(f, 1.2);
    CHECK(max_abs_diff(a, b) < 1e-12 * std::max(1.0, testutil::max_abs(b)));
  }
}

TEST_CASE("Riesz transforms of single modes") {
  Grid g({32, 32});
  const auto s = forward(sample(g, [](const auto& x) { return std::sin(x[0]); }));
  const auto c = sample(g, [](const auto& x) { return std::cos(x[0]); });
  CHECK(max_abs_diff(inverse(riesz_transform(s, 0)), c) < 1e-13);
  CHECK(testutil::max_abs(inverse(riesz_transform(s, 1))) < 1e-14);
  CHECK_THROWS_AS(riesz_transform(s, 2), std::invalid_argument);
}

TEST_CASE("sum of squared Riesz transforms removes the mean") {
  Grid g({32, 32});
  for (unsigned seed = 0; seed < 20; ++seed) {
    const auto f = random_trig(g, seed, 10);
    const auto hat = forward(f);
    PhysicalField sum(g);
    for (std::size_t a = 0; a < 2; ++a) sum = sum + inverse(riesz_transform(riesz_transform(hat, a), a));
    CHECK(max_abs_diff(sum, -1.0 * add_constant(f, -mean(f))) < 1e-12);
  }
}

TEST_CASE("gradient and divergence") {
  Grid g({32, 32});
  PhysicalField c(g, std::vector<double>(g.total(), 1.5));
  for (const auto& comp : gradient(c)) CHECK(testutil::max_abs(comp) < 1e-14);
  const auto s = sample(g, [](const auto& x) { return std::sin(x[0]); });
  const auto gr = gradient(s);
  CHECK(max_abs_diff(gr[0], sample(g, [](const auto& x) { return std::cos(x[0]); })) < 1e-13);
  CHECK(testutil::max_abs(gr[1]) < 1e-14);
  for (unsigned seed = 0; seed < 5; ++seed) {
    const auto psi = random_trig(g, seed, 8);
    const auto hat = forward(psi);
    VectorField v{-1.0 * inverse(derivative(hat, 1)), inverse(derivative(hat, 0))};
    CHECK(testutil::max_abs(divergence(v)) < 1e-12);
  }
}

TEST_CASE("dealias is idempotent and removes the top band") {
  Grid g({24 + 8, 32});
  const auto f = random_trig(g, 1, 5);
  const auto hat = forward(f);
  CHECK(is_dealiased(hat, 1e-14));
  CHECK(max_abs_diff(inverse(dealias(hat)), f) < 1e-13);
  const auto top = forward(sample(g, [](const auto& x) { return std::cos(15.0 * x[0]); }));
  CHECK(testutil::max_abs(inverse(dealias(top))) < 1e-14);
  std::mt19937 rng(2);
  std::normal_distribution<double> n;
  PhysicalField r(g);
  for (auto& x : r.values) x = n(rng);
  const auto d1 = dealias(forward(r));
  const auto d2 = dealias(d1);
  for (std::size_t i = 0; i < d1.coeffs.size(); ++i) CHECK(d1.coeffs[i] == d2.coeffs[i]);
}

TEST_CASE("H^{1/2} seminorm two routes") {
  Grid g({32, 32});
  PhysicalField c(g, std::vector<double>(g.total(), 1.0));
  CHECK(h_half_seminorm(forward(c)) == 0.0);
  const auto s = sample(g, [](const auto& x) { return std::sin(x[0]); });
  CHECK(h_half_seminorm(forward(s)) == doctest::Approx(l2_norm_sq(s)).epsilon(1e-12));
  for (unsigned seed = 0; seed < 5; ++seed) {
    const auto f = random_trig(g, seed, 8);
    const double via_op = l2_norm_sq(fractional_laplacian(f, 0.5));
    CHECK(h_half_seminorm(forward(f)) == doctest::Approx(via_op).epsilon(1e-12));
  }
}

TEST_CASE("multipliers commute and preserve conjugate symmetry") {
  Grid g({16, 16}, {1.0, 2.0});
  const auto hat = forward(random_trig(g, 9, 5));
  auto ops = std::vector<std::function<SpectralField(const SpectralField&)>>{
      [](const SpectralField& f) { return fractional_laplacian(f, 0.7); },
      [](const SpectralField& f) { return riesz_transform(f, 0); },
      [](const SpectralField& f) { return riesz_transform(f, 1); },
      [](const SpectralField& f) { return derivative(f, 1); },
      [](const SpectralField& f) { return dealias(f); },
  };
  for (std::size_t i = 0; i < ops.size(); ++i) {
    CHECK(conjugate_symmetry_defect(ops[i](hat)) < 1e-13);
    for (std::size_t j = i + 1; j < ops.size(); ++j) {
      const auto ab = ops[i](ops[j](hat));
      const auto ba = ops[j](ops[i](hat));
      double worst = 0.0;
      for (std::size_t k = 0; k < ab.coeffs.size(); ++k) worst = std::max(worst, std::abs(ab.coeffs[k] - ba.coeffs[k]));
      CHECK(worst < 1e-12);
    }
  }
}
