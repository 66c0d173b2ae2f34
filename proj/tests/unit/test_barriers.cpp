#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sqglab/barriers.hpp"
#include "sqglab/extension.hpp"

using namespace sqglab;

namespace {

constexpr double pi = std::numbers::pi;

// Separable solution of the continuous b1 problem with one horizontal axis:
// 2 - b1 = sum_{n odd} 8/(n pi) sin(n pi (x + 4)/8) sinh(n pi (4 - z)/8) / sinh(n pi / 2).
double b1_series(double x, double z) {
  double w = 0.0;
  for (int n = 1; n < 4000; n += 2) {
    const double a = n * pi / 8.0;
    // sinh ratio written with exponentials to avoid overflow.
    const double ratio = std::exp(-a * z) * (1.0 - std::exp(-2.0 * a * (4.0 - z))) / (1.0 - std::exp(-8.0 * a));
    w += 8.0 / (n * pi) * std::sin(a * (x + 4.0)) * ratio;
  }
  return 2.0 - w;
}

}  // namespace

TEST_CASE("layered Laplace solve reproduces a discrete harmonic function") {
  const std::size_t n = 16, layers = 12;
  // u(i, j) = sin(pi i / n) sinh(a j) / sinh(a L) with cosh a = 2 - cos(pi / n).
  const double a = std::acosh(2.0 - std::cos(pi / n));
  LayeredLaplace p{{n}, layers, std::vector<double>(n - 1, 0.0), std::vector<double>(n - 1)};
  for (std::size_t i = 1; i < n; ++i) p.top[i - 1] = std::sin(pi * i / n);
  const auto u = solve_layered_laplace(p);
  double err = 0.0;
  for (std::size_t j = 1; j < layers; ++j) {
    for (std::size_t i = 1; i < n; ++i) {
      const double exact = std::sin(pi * i / n) * std::sinh(a * j) / std::sinh(a * layers);
      err = std::max(err, std::abs(u[(j - 1) * (n - 1) + i - 1] - exact));
    }
  }
  CHECK(err < 1e-13);

  // Two transverse axes: product mode.
  // Discrete modes satisfy cosh a = 1 + s/2 with s the transverse eigenvalue sum.
  const double shift = (2.0 - 2.0 * std::cos(pi / 8)) + (2.0 - 2.0 * std::cos(2 * pi / 8));
  const double a2 = std::acosh(1.0 + 0.5 * shift);
  LayeredLaplace q{{8, 8}, 6, std::vector<double>(49), std::vector<double>(49, 0.0)};
  for (std::size_t i = 1; i < 8; ++i)
    for (std::size_t k = 1; k < 8; ++k) q.bottom[(i - 1) * 7 + k - 1] = std::sin(pi * i / 8) * std::sin(2 * pi * k / 8);
  const auto v = solve_layered_laplace(q);
  err = 0.0;
  for (std::size_t j = 1; j < 6; ++j)
    for (std::size_t i = 1; i < 8; ++i)
      for (std::size_t k = 1; k < 8; ++k) {
        const double exact = std::sin(pi * i / 8) * std::sin(2 * pi * k / 8) * std::sinh(a2 * (6.0 - j)) / std::sinh(a2 * 6.0);
        err = std::max(err, std::abs(v[(j - 1) * 49 + (i - 1) * 7 + k - 1] - exact));
      }
  CHECK(err < 1e-13);
  CHECK_THROWS_AS(solve_layered_laplace(LayeredLaplace{{8}, 6, {1.0}, {1.0}}), std::invalid_argument);
}

TEST_CASE("b2 series") {
  const BarrierB2 b{50, 2.0};
  for (double x : {0.0, 0.3, 2.0}) {
    CHECK(barrier_b2_eval(b, x, 0.0).value == 0.0);
    CHECK(barrier_b2_eval(b, x, 1.0).value == 0.0);
  }
  // At x = 0 the partial sums are an alternating series for the boundary value.
  for (int p : {10, 50, 400}) {
    const double v = barrier_b2_eval(BarrierB2{p, 2.0}, 0.0, 0.5).value;
    CHECK(std::abs(v - 2.0) <= 8.0 / (pi * (2 * p + 1)) + 1e-14);
  }
  CHECK(std::isinf(barrier_b2_eval(b, 0.0, 0.5).tail_bound));
  for (double x : {0.01, 0.1, 0.5}) {
    for (double z : {0.1, 0.37, 0.5}) {
      const auto a = barrier_b2_eval(BarrierB2{5, 2.0}, x, z);
      const auto ref = barrier_b2_eval(BarrierB2{2000, 2.0}, x, z);
      CHECK(std::abs(a.value - ref.value) <= a.tail_bound);
    }
  }
  CHECK_THROWS_AS(barrier_b2_eval(b, -0.1, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(barrier_b2_eval(b, 0.1, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(barrier_b2_eval(BarrierB2{0, 2.0}, 0.1, 0.5), std::invalid_argument);
}

TEST_CASE("b2 series against the finite-difference oracle") {
  const BarrierB2 b{50, 1.0};
  const auto coarse = barrier_b2_finite_difference(1.0 / 64, 6.0, 1.0);
  const auto fine = barrier_b2_finite_difference(1.0 / 128, 6.0, 1.0);
  const double s = barrier_b2_eval(b, 1.0, 0.5).value;
  const double e1 = std::abs(coarse.at(64, 32) - s);
  const double e2 = std::abs(fine.at(128, 64) - s);
  CHECK(e2 < e1);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.1));
  CHECK(e2 < 1e-4);
  CHECK(fine.at(0, 64) == 1.0);
  CHECK(fine.at(10, 0) == 0.0);
}

TEST_CASE("b2 decay profile") {
  std::vector<double> xs;
  for (int i = 1; i <= 50; ++i) xs.push_back(0.1 * i);
  const auto scan = barrier_b2_decay_check(BarrierB2{50, 1.0}, xs);
  CHECK(std::isfinite(scan.c_bar));
  CHECK(scan.nondecreasing_tail);
  CHECK(scan.asymptote == doctest::Approx(4.0 / pi));
  CHECK(scan.c_bar >= scan.scan_max);
  const auto at3 = barrier_b2_decay_check(BarrierB2{50, 1.0}, {3.0});
  CHECK(std::abs(at3.profile[0] / (4.0 / pi) - 1.0) < 0.01);
  for (double x : xs) CHECK(barrier_b2_eval(BarrierB2{}, x, 0.0).value == 0.0);
  CHECK(barrier_b2_decay_check(BarrierB2{50, 2.0}, xs).c_bar == doctest::Approx(8.0 / pi));
}

TEST_CASE("b1 barrier and lambda") {
  const auto b = solve_barrier_b1(64);
  const std::size_t r = 64, nz = 32;
  for (std::size_t ix = 0; ix <= r; ++ix) CHECK(b.values[b.index({ix}, 0)] == 0.0);
  for (std::size_t iz = 1; iz <= nz; ++iz) {
    CHECK(b.values[b.index({0}, iz)] == 2.0);
    CHECK(b.values[b.index({r}, iz)] == 2.0);
  }
  for (std::size_t ix = 0; ix <= r; ++ix) CHECK(b.values[b.index({ix}, nz)] == 2.0);
  for (double v : b.values) {
    CHECK(v >= 0.0);
    CHECK(v <= 2.0);
  }
  CHECK(b.residual < 1e-8);
  CHECK(b.lambda > 0.0);

  const auto f = solve_barrier_b1(128);
  CHECK(std::abs(f.lambda - b.lambda) < 0.05 * f.lambda);
  // Largest value on the inner box is at its top corners (x = +-2, z = 2).
  const double exact = b1_series(2.0, 2.0);
  CHECK(std::abs(f.max_inner - exact) < std::abs(b.max_inner - exact));
  CHECK(std::abs(f.max_inner - exact) < 1e-3);

  const auto b2d = solve_barrier_b1(32, 2);
  CHECK(b2d.lambda > 0.0);
  CHECK(b2d.residual < 1e-8);
  CHECK(b2d.lambda < b.lambda);  // a second pair of lateral faces pushes values up
  CHECK_THROWS_AS(solve_barrier_b1(30), std::invalid_argument);
  CHECK_THROWS_AS(solve_barrier_b1(64, 3), std::invalid_argument);
}

TEST_CASE("constants ledger") {
  const double cbar = 8.0 / pi;
  const auto l = constants_ledger_build(0.05, 2, 1.0, cbar);
  CHECK(l.delta > 0.0);
  CHECK(l.delta <= 0.25);
  CHECK(l.cap >= 2.0 / l.delta);
  CHECK(l.cap >= std::pow(l.c0, 4.0));
  CHECK(l.poisson_l2 == doctest::Approx(poisson_kernel_l2_norm(make_poisson_kernel(2))));
  const auto v = constants_ledger_verify(l);
  CHECK(v.all());
  CHECK(v.third_from == 24);
  CHECK(v.third_to == 64);

  // Slightly larger delta breaks the first inequality unless delta already sits at the cap.
  if (l.delta < 0.25) {
    auto bigger = l;
    bigger.delta += 1e-3;
    CHECK_FALSE(constants_ledger_verify(bigger).first);
  }
  const auto looser = constants_ledger_build(0.2, 2, 1.0, cbar);
  CHECK(looser.delta >= l.delta);
  CHECK(looser.cap <= l.cap);
  CHECK(constants_ledger_verify(looser).all());

  CHECK_THROWS_AS(constants_ledger_build(0.0, 2, 1.0, cbar), std::invalid_argument);
  CHECK_THROWS_AS(constants_ledger_build(1.5, 2, 1.0, cbar), std::invalid_argument);
  CHECK_THROWS_AS(constants_ledger_build(0.1, 2, -1.0, cbar), std::invalid_argument);
}

TEST_CASE("isoperimetric measurements") {
  const auto ones = sample_nodes(2, 32, [](const std::vector<double>&) { return 1.5; });
  const auto r1 = isoperimetric_check(ones);
  CHECK(r1.measure_below == 0.0);
  CHECK(r1.lhs == 0.0);
  CHECK(r1.lhs <= r1.rhs);

  const auto ramp = sample_nodes(2, 64, [](const std::vector<double>& x) { return std::clamp(x[0] / 0.5, 0.0, 1.0); });
  const auto r = isoperimetric_check(ramp);
  CHECK(r.measure_below == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.measure_above == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.measure_between == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.gradient_norm == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.lhs == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.rhs == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.ratio == doctest::Approx(1.0).epsilon(1e-12));

  // Three-dimensional ramp: areas scale by the extra side length 2.
  const auto r3 = isoperimetric_check(sample_nodes(3, 16, [](const std::vector<double>& x) {
    return std::clamp(x[0] / 0.5, 0.0, 1.0);
  }));
  CHECK(r3.measure_below == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(r3.gradient_norm == doctest::Approx(std::sqrt(8.0)).epsilon(1e-12));
}

TEST_CASE("isoperimetric corpus") {
  const auto corpus = isoperimetric_corpus(2, 200, 7);
  const auto a = isoperimetric_sweep(2, 64, corpus);
  const auto b = isoperimetric_sweep(2, 128, corpus);
  CHECK(std::isfinite(a.max_ratio));
  CHECK(a.max_ratio > 0.0);
  CHECK(std::abs(a.max_ratio / b.max_ratio - 1.0) < 0.1);

  const auto fresh = isoperimetric_sweep(2, 64, isoperimetric_corpus(2, 1000, 8));
  std::size_t below = 0;
  for (double q : fresh.ratios) below += q <= a.max_ratio ? 1 : 0;
  CHECK(below >= 990);
}

TEST_CASE("b2 oracle comparison uses the Richardson error estimate") {
  const auto c = barrier_b2_oracle_check(BarrierB2{50, 1.0}, 1.0 / 64);
  CHECK(c.points == 23 * 3);
  CHECK(c.max_error < 1e-3);
  // The FD error is O(h^2) and its Richardson estimate tracks it closely.
  CHECK(c.worst_ratio < 1.5);
  CHECK(c.worst_ratio > 0.5);
  CHECK_THROWS_AS(barrier_b2_oracle_check(BarrierB2{}, 0.3), std::invalid_argument);
}
