#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "helpers.hpp"
#include "sqglab/diagnostics.hpp"
#include "sqglab/fft.hpp"
#include "sqglab/solver.hpp"
#include "sqglab/spectral.hpp"

using namespace sqglab;
using testutil::max_abs;
using testutil::max_abs_diff;
using testutil::random_trig;

namespace {

constexpr double pi = std::numbers::pi;

SolverConfig desk_config(std::size_t n, double t_end, double dt, DriftMode drift = DriftMode::sqg) {
  SolverConfig c;
  c.grid = Grid({n, n});
  c.dt = dt;
  c.t_end = t_end;
  c.drift = drift;
  c.initial.k_min = 1;
  c.initial.k_max = 5;
  c.initial.amplitude = 0.5;
  c.initial.seed = 11;
  return c;
}

// Brute force over every periodic placement of cubes of side 2^j cells (j >= 1).
double bmo_all_cubes(const PhysicalField& u) {
  const Grid& g = u.grid;
  const std::size_t n0 = g.size(0), n1 = g.size(1);
  double best = 0.0;
  for (std::size_t side = 2; side <= n0; side *= 2) {
    for (std::size_t i0 = 0; i0 < n0; ++i0) {
      for (std::size_t j0 = 0; j0 < n1; ++j0) {
        double m = 0.0;
        for (std::size_t i = 0; i < side; ++i)
          for (std::size_t j = 0; j < side; ++j) m += u.values[((i0 + i) % n0) * n1 + (j0 + j) % n1];
        m /= static_cast<double>(side * side);
        double d = 0.0;
        for (std::size_t i = 0; i < side; ++i)
          for (std::size_t j = 0; j < side; ++j) d += std::abs(u.values[((i0 + i) % n0) * n1 + (j0 + j) % n1] - m);
        best = std::max(best, d / static_cast<double>(side * side));
      }
      if (side == n0) break;  // every placement of the full torus is the same cube
    }
  }
  return best;
}

// Aligned dyadic cubes only, written as explicit nested loops.
double bmo_dyadic_loops(const PhysicalField& u) {
  const std::size_t n = u.grid.size(0);
  double best = 0.0;
  for (std::size_t side = n; side >= 2; side /= 2) {
    for (std::size_t i0 = 0; i0 < n; i0 += side) {
      for (std::size_t j0 = 0; j0 < n; j0 += side) {
        double m = 0.0;
        for (std::size_t i = i0; i < i0 + side; ++i)
          for (std::size_t j = j0; j < j0 + side; ++j) m += u.values[i * n + j];
        m /= static_cast<double>(side * side);
        double d = 0.0;
        for (std::size_t i = i0; i < i0 + side; ++i)
          for (std::size_t j = j0; j < j0 + side; ++j) d += std::abs(u.values[i * n + j] - m);
        best = std::max(best, d / static_cast<double>(side * side));
      }
    }
  }
  return best;
}

PhysicalField smoothed_step(const Grid& g) {
  const double x0 = 0.3 * g.length(0);
  return sample(g, [&](const std::array<double, 3>& x) { return std::tanh((x[0] - x0) / 0.05); });
}

}  // namespace

TEST_CASE("truncation levels") {
  Grid g({16, 16});
  const auto th = random_trig(g, 3, 3);
  CHECK(max_abs(truncate(th, max_abs(th) + 1.0)) == 0.0);
  const double low = -1e6;
  const auto all = truncate(th, low);
  for (std::size_t i = 0; i < th.size(); ++i) CHECK(all[i] == th[i] - low);
  for (unsigned s = 0; s < 10; ++s) {
    const auto f = random_trig(g, 100 + s, 3);
    const double l1 = -0.1 * s, l2 = 0.05 * s;
    const auto nested = truncate(truncate(f, l1), l2 - l1);
    const auto direct = truncate(f, l2);
    CHECK(max_abs_diff(nested, direct) < 1e-15);
    CHECK(l2_norm(direct) <= l2_norm(truncate(f, l1)));
    CHECK(linf_norm(direct) <= linf_norm(truncate(f, l1)));
  }
  const auto lv = spanning_levels(th, 16);
  CHECK(lv.size() == 16);
  CHECK(lv.front() == doctest::Approx(*std::min_element(th.values.begin(), th.values.end())));
  CHECK(lv.back() == doctest::Approx(*std::max_element(th.values.begin(), th.values.end())));
}

TEST_CASE("level-set energy inequality on pure diffusion") {
  auto cfg = desk_config(32, 0.5, 0.01, DriftMode::zero);
  const auto traj = run(cfg);
  const double e0 = l2_norm_sq(traj.initial());
  const auto r = level_set_energy_check(traj, 0.0, 0.0, 0.5);
  CHECK(r.status == CheckStatus::pass);
  CHECK(r.residual <= 1e-6 * e0);

  const auto above = level_set_energy_check(traj, max_abs(traj.initial()) + 0.1, 0.0, 0.5);
  CHECK(above.lhs == 0.0);
  CHECK(above.rhs == 0.0);
  CHECK(above.status == CheckStatus::pass);

  // A very low level sees the whole field, so it reproduces the global law.
  const double inf = std::numeric_limits<double>::infinity();
  const auto glob = level_set_energy_check(traj, -inf, 0.0, 0.5);
  const auto low = level_set_energy_check(traj, -max_abs(traj.initial()) - 1.0, 0.0, 0.5);
  CHECK(glob.status == CheckStatus::pass);
  CHECK(std::abs(glob.residual) < 1e-6 * e0);
  CHECK(std::abs(low.residual - glob.residual) < 1e-7 * e0);
}

TEST_CASE("level-set sweep on an SQG run") {
  const auto traj = run(desk_config(32, 0.4, 0.01));
  const auto levels = spanning_levels(traj.initial(), 8);
  const auto res = level_set_sweep(traj, levels, 0.0, 0.4);
  REQUIRE(res.size() == 8);
  for (const auto& r : res) {
    CHECK(r.status == CheckStatus::pass);
    CHECK(std::isfinite(r.residual));
  }
  // Intermediate window.
  const auto mid = level_set_energy_check(traj, 0.0, 0.1, 0.3);
  CHECK(mid.status == CheckStatus::pass);
  // Two snapshots are not enough to integrate.
  const auto sparse = level_set_energy_check(traj, 0.0, 0.1, 0.11);
  CHECK(sparse.status == CheckStatus::inconclusive);
  CHECK_THROWS_AS(level_set_energy_check(traj, 0.0, 0.3, 0.1), std::invalid_argument);
}

TEST_CASE("U_k ledger") {
  const auto traj = run(desk_config(32, 1.0, 0.01));
  const double peak = max_abs(traj.initial());
  CHECK_THROWS_AS(uk_sequence(traj, 1.0, 1.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(uk_sequence(traj, 0.0, 0.2, 4), std::invalid_argument);

  // C_1 = M/2 above the sup over the whole run kills every level k >= 1.
  const auto high = uk_sequence(traj, 2.0 * peak + 0.01, 0.2, 4);
  for (std::size_t k = 1; k < high.energies.size(); ++k) CHECK(high.energies[k] == 0.0);

  const auto led = uk_sequence(traj, peak, 0.4, 6);
  REQUIRE(led.energies.size() == 7);
  for (std::size_t k = 1; k <= 6; ++k) {
    CHECK(led.levels[k] > led.levels[k - 1]);
    CHECK(led.times[k] > led.times[k - 1]);
    CHECK(led.levels[k] < led.cap);
    CHECK(led.energies[k] <= led.energies[k - 1] + 1e-12);
    CHECK(led.energies_upper[k] >= led.energies[k]);
    CHECK(led.chebyshev_lhs[k] <= led.chebyshev_rhs[k]);
  }
  CHECK(led.energies[0] <= led.initial_energy + 1e-8);
  CHECK(led.energies[0] > 0.0);

  const auto rep = uk_recursion_check(led);
  CHECK(rep.monotone);
  CHECK(rep.chebyshev_ok);
  CHECK_FALSE(rep.implication_violated);
  CHECK(std::isfinite(rep.fitted_constant));
}

TEST_CASE("recursion fit on synthetic ledgers") {
  LevelSetLedger led{};
  led.cap = 2.0;
  led.t0 = 0.5;
  led.dim = 2;
  led.energies.assign(5, 0.0);
  led.chebyshev_lhs.assign(5, 0.0);
  led.chebyshev_rhs.assign(5, 0.0);
  auto rep = uk_recursion_check(led);
  CHECK(rep.fitted_constant == 0.0);
  CHECK(rep.below_threshold);
  CHECK(rep.geometric_decay);

  // U_k = c 4^k U_{k-1}^{3/2} exactly in two dimensions.
  const double c = 0.3;
  led.energies = {0.01};
  for (int k = 1; k <= 4; ++k) led.energies.push_back(c * std::pow(4.0, k) * std::pow(led.energies.back(), 1.5));
  rep = uk_recursion_check(led);
  CHECK(rep.fitted_constant == doctest::Approx(c).epsilon(1e-12));
  CHECK(rep.normalised_constant == doctest::Approx(c * 0.5 * 2.0).epsilon(1e-12));
  CHECK(rep.monotone);
  // Threshold c^{-2} 4^{-4} = 0.0434 > 0.01.
  CHECK(rep.below_threshold);

  led.energies = {1.0, 0.0, 0.1, 0.0, 0.0};
  rep = uk_recursion_check(led);
  CHECK(rep.implication_violated);
  CHECK_FALSE(std::isfinite(rep.fitted_constant));

  led.energies = {1.0, 0.5};
  CHECK_THROWS_AS(uk_recursion_check(led), std::invalid_argument);
}

TEST_CASE("L-infinity decay constant") {
  auto cfg = desk_config(32, 1.0, 0.05, DriftMode::zero);
  cfg.initial.kind = InitialCondition::Kind::single_mode;
  cfg.initial.mode = {4, 0};
  cfg.initial.amplitude = 1.0;
  const auto traj = run(cfg);
  const auto r = linf_decay_check(traj, 0.1, 1.0);
  CHECK(r.status == CheckStatus::pass);
  // cos(4x) e^{-4t}: ||theta_0|| = sqrt(2) pi, so T e^{-4T} / (sqrt(2) pi) peaks at T = 1/4.
  const double expect = 0.25 * std::exp(-1.0) / (std::sqrt(2.0) * pi);
  CHECK(r.constant == doctest::Approx(expect).epsilon(1e-9));
  CHECK(r.argmax_time == doctest::Approx(0.25));
  CHECK(r.spectral_tail < 1e-20);

  // Band 4..8 decays at least like e^{-4T} times the coefficient l1 norm.
  cfg.initial.kind = InitialCondition::Kind::random_band;
  cfg.initial.k_min = 4;
  cfg.initial.k_max = 8;
  cfg.dt = 0.02;
  const auto band = run(cfg);
  const auto hat = forward(band.initial());
  double l1 = 0.0;
  for (const auto& c : hat.coeffs) l1 += std::abs(c);
  const auto rb = linf_decay_check(band, 0.1, 1.0);
  CHECK(rb.constant <= 0.25 * std::exp(-1.0) * l1 / l2_norm(band.initial()));

  cfg.initial.amplitude = 0.0;
  const auto zero = run(cfg);
  CHECK(linf_decay_check(zero, 0.1, 1.0).constant == 0.0);
  CHECK_THROWS_AS(linf_decay_check(zero, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("pointwise fractional inequality for convex functions") {
  Grid g({32, 32});
  const auto s = sample(g, [](const std::array<double, 3>& x) { return std::sin(x[0]); });
  // phi(s) = s^2 on sin: 2 sin^2 - Lambda(sin^2) = (1 - cos 2x) + cos 2x = 1.
  const auto sq = cordoba_pointwise_check(s, square_function(), 2);
  CHECK(sq.status == CheckStatus::pass);
  for (double v : sq.residual.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));

  for (unsigned seed = 0; seed < 10; ++seed) {
    const auto th = random_trig(g, 200 + seed, 4);
    const auto lin = cordoba_pointwise_check(th, linear_function(-1.5, 0.3), 2);
    CHECK(max_abs(lin.residual) < 1e-12 * std::max(1.0, lin.scale));
    const auto q = cordoba_pointwise_check(th, square_function(), 2);
    CHECK(q.status == CheckStatus::pass);
    CHECK(q.aliasing_allowance < 1e-10 * q.scale);
    const double spread = 2.0 * max_abs(th);
    const auto sp = cordoba_pointwise_check(th, smoothed_positive_part(0.1 * seed / 10.0, 0.1 * spread), 4);
    CHECK(sp.status == CheckStatus::pass);
    CHECK(sp.min_residual >= -1e-8 * sp.scale);
  }
  const ConvexFunction concave{"concave", [](double x) { return -x * x; }, [](double x) { return -2.0 * x; }};
  CHECK_THROWS_AS(cordoba_pointwise_check(s, concave), std::invalid_argument);
}

TEST_CASE("local energy inequality") {
  auto cfg = desk_config(32, 0.2, 0.01, DriftMode::zero);
  const auto traj = run(cfg);
  const LocalCutoff cut{{pi, pi}, 2.0};

  LocalEnergyOptions above;
  above.level = max_abs(traj.initial()) + 0.1;
  const auto none = local_energy_check(traj, cut, 0.0, 0.2, above);
  CHECK(none.extension_energy == 0.0);
  CHECK(none.mass_t1 == 0.0);
  CHECK(none.phi_hat == 0.0);

  // Without drift the proof form is an identity up to discretisation.
  const auto coarse = local_energy_check(traj, cut, 0.0, 0.2);
  CHECK(coarse.status == CheckStatus::pass);
  CHECK(coarse.bmo_bound == 0.0);
  const double balance = coarse.extension_energy + 0.5 * coarse.mass_t2 - 0.5 * coarse.mass_t1 - coarse.cutoff_energy;
  CHECK(std::abs(balance) < 0.02 * coarse.extension_energy);
  CHECK(coarse.phi_hat < 0.05);

  cfg.drift = DriftMode::sqg;
  const auto sqg = run(cfg);
  const auto a = local_energy_check(sqg, cut, 0.0, 0.2);
  CHECK(a.status == CheckStatus::pass);
  CHECK(a.bmo_bound > 0.0);
  CHECK(a.bmo_bound <= 2.0 * linf_norm(sqg.velocity_at(0)) + 1e-12);

  CHECK_THROWS_AS(local_energy_check(traj, LocalCutoff{{pi, pi}, 3.2}, 0.0, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(local_energy_check(traj, LocalCutoff{{pi}, 2.0}, 0.0, 0.2), std::invalid_argument);
  cfg.beta = 0.8;
  cfg.drift = DriftMode::zero;
  CHECK_THROWS_AS(local_energy_check(run(cfg), cut, 0.0, 0.2), std::invalid_argument);
}

TEST_CASE("BMO seminorm") {
  Grid g({32, 32});
  PhysicalField c(g, std::vector<double>(g.total(), 3.5));
  CHECK(bmo_seminorm(c) == 0.0);
  for (unsigned seed = 0; seed < 5; ++seed) {
    const auto u = random_trig(g, 300 + seed, 6);
    const double b = bmo_seminorm(u);
    CHECK(b <= 2.0 * linf_norm(u));
    CHECK(b == doctest::Approx(bmo_dyadic_loops(u)).epsilon(1e-13));
    CHECK(bmo_seminorm(add_constant(u, 7.25)) == doctest::Approx(b).epsilon(1e-13));
  }
  for (std::size_t n : {64u, 128u}) {
    const auto step = smoothed_step(Grid({n, n}));
    const double dyadic = bmo_seminorm(step);
    const double brute = bmo_all_cubes(step);
    CHECK(dyadic <= brute + 1e-14);
    CHECK(dyadic >= 0.9 * brute);
  }
  const VectorField v = testutil::velocity_stream(g, 9, 3);
  CHECK(bmo_seminorm(v) <= 2.0 * linf_norm(v));
  // The drift integrates to zero over the torus; the ball term does not vanish in general.
  CHECK(ball_mean_term(v, {pi, pi}, pi) < 1e-12);
  CHECK(ball_mean_term(v, {1.0, 2.0}, 2.0) >= 0.0);
}

TEST_CASE("diagnostics report json") {
  DiagnosticsReport rep;
  CheckResult a;
  a.name = "alpha";
  a.property = "int gamma^2 nonincreasing";
  a.residual = -1.0;
  a.tolerance = 1e-5;
  a.values["phi"] = std::numeric_limits<double>::infinity();
  rep.add(a);
  CheckResult b = a;
  b.name = "beta";
  b.status = CheckStatus::fail;
  rep.add(b);
  CHECK(rep.any_failed());
  const auto js = rep.to_json();
  CHECK(js.find("\"alpha\"") != std::string::npos);
  CHECK(js.find("\"phi\": null") != std::string::npos);
  CHECK(js.find("\"status\": \"fail\"") != std::string::npos);
}
