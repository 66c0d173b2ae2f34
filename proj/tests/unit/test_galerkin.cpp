#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sqglab/galerkin.hpp"

using namespace sqglab;

TEST_CASE("1D and 2D eigenpairs") {
  const auto b1 = build_basis(1, 6);
  for (std::size_t k = 0; k < 6; ++k) {
    CHECK(b1.mode(k).index[0] == static_cast<int>(k + 1));
    CHECK(b1.mode(k).frequency == doctest::Approx(static_cast<double>(k + 1)));
    const std::array<double, 3> x{0.7, 0.0, 0.0};
    CHECK(b1.eval(k, x) == doctest::Approx(std::sqrt(2.0 / std::numbers::pi) * std::sin((k + 1) * 0.7)));
  }
  const auto b2 = build_basis(2, 10);
  CHECK(b2.mode(0).index == std::vector<int>{1, 1});
  CHECK(b2.mode(0).eigenvalue == 2.0);
  for (std::size_t k = 1; k < b2.size(); ++k) CHECK(b2.mode(k).eigenvalue >= b2.mode(k - 1).eigenvalue);
  // (1,2) and (2,1) share eigenvalue 5.
  CHECK(b2.mode(1).eigenvalue == 5.0);
  CHECK(b2.mode(2).eigenvalue == 5.0);
}

TEST_CASE("basis enumeration takes the smallest eigenvalues") {
  const auto b = build_basis(3, 40);
  // Brute force over a generous box.
  std::vector<double> all;
  for (int i = 1; i <= 10; ++i)
    for (int j = 1; j <= 10; ++j)
      for (int l = 1; l <= 10; ++l) all.push_back(i * i + j * j + l * l);
  std::sort(all.begin(), all.end());
  for (std::size_t k = 0; k < b.size(); ++k) CHECK(b.mode(k).eigenvalue == all[k]);
}

TEST_CASE("Gram matrix is the identity") {
  CHECK(build_basis(2, 16).orthonormality_defect() < 1e-10);
  CHECK(build_basis(1, 16).orthonormality_defect() < 1e-10);
  CHECK(build_basis(3, 20).orthonormality_defect() < 1e-10);
  CHECK_THROWS_AS(build_basis(2, 16, 8), std::invalid_argument);
  CHECK_THROWS_AS(build_basis(2, 0), std::invalid_argument);
  CHECK_THROWS_AS(build_basis(4, 3), std::invalid_argument);
}

TEST_CASE("projection inverts reconstruction") {
  const auto b = build_basis(2, 24);
  std::vector<double> f(b.size());
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = std::cos(1.3 * static_cast<double>(k));
  const auto back = b.project(b.reconstruct(f));
  for (std::size_t k = 0; k < f.size(); ++k) CHECK(back[k] == doctest::Approx(f[k]).epsilon(1e-12));
}

TEST_CASE("coupling matrix") {
  const auto b = build_basis(2, 20);
  const auto zero = coupling_matrix(b, zero_drift(b));
  CHECK(zero.a.cwiseAbs().maxCoeff() == 0.0);
  const auto psi = random_stream_function(3, 2.0, 11);
  const auto a = coupling_matrix(b, drift_from_stream(b, psi));
  CHECK(a.antisymmetric);
  CHECK(a.antisymmetry_defect < 1e-8);
  for (Eigen::Index k = 0; k < a.a.rows(); ++k) CHECK(std::abs(a.a(k, k)) < 1e-10);
  CHECK(a.a.cwiseAbs().maxCoeff() > 1e-3);
  // A compressive drift breaks antisymmetry.
  const auto bad = coupling_matrix(b, sample_drift(b, [](const auto& x) { return std::array<double, 3>{std::sin(x[0]), 0.0, 0.0}; }));
  CHECK_FALSE(bad.antisymmetric);
}

TEST_CASE("stream function samples are recovered") {
  const auto b = build_basis(2, 12);
  const auto psi = random_stream_function(2, 1.0, 4);
  std::vector<double> samples(b.quadrature_size());
  for (std::size_t p = 0; p < samples.size(); ++p) {
    const auto x = b.point(p);
    for (std::size_t i = 0; i < psi.modes.size(); ++i)
      samples[p] += psi.coeffs[i] * std::sin(psi.modes[i][0] * x[0]) * std::sin(psi.modes[i][1] * x[1]);
  }
  const auto rec = stream_from_samples(b, samples);
  const auto d1 = drift_from_stream(b, psi);
  const auto d2 = drift_from_stream(b, rec);
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t p = 0; p < d1.components[a].size(); ++p) CHECK(d1.components[a][p] == doctest::Approx(d2.components[a][p]).epsilon(1e-10));
}

TEST_CASE("v = 0 gives decoupled exponential decay") {
  const auto b = build_basis(2, 16);
  GalerkinSystem sys(b, coupling_matrix(b, zero_drift(b)), 0.0);
  GalerkinState s0;
  s0.coeffs.assign(b.size(), 1.0);
  const auto states = galerkin_run(s0, sys, 0.005, 1.0);
  CHECK(states.back().time == doctest::Approx(1.0));
  double worst = 0.0;
  for (const auto& s : states)
    for (std::size_t k = 0; k < b.size(); ++k) worst = std::max(worst, std::abs(s.coeffs[k] - std::exp(-b.mode(k).frequency * s.time)));
  CHECK(worst < 1e-8);
  GalerkinState z;
  z.coeffs.assign(b.size(), 0.0);
  for (const auto& s : galerkin_run(z, sys, 0.01, 0.1))
    for (double f : s.coeffs) CHECK(f == 0.0);
}

TEST_CASE("transport alone conserves energy to RK4 order") {
  const auto b = build_basis(2, 20);
  const auto a = coupling_matrix(b, drift_from_stream(b, random_stream_function(3, 1.0, 2)));
  GalerkinSystem sys(b, a, 0.0, false);
  GalerkinState s0;
  for (std::size_t k = 0; k < b.size(); ++k) s0.coeffs.push_back(1.0 / (1.0 + k));
  std::vector<double> drift;
  for (double dt : {0.02, 0.01}) {
    const auto st = galerkin_run(s0, sys, dt, 1.0);
    double e0 = 0.0, e1 = 0.0;
    for (double f : st.front().coeffs) e0 += f * f;
    for (double f : st.back().coeffs) e1 += f * f;
    drift.push_back(std::abs(e1 - e0) / e0);
    CHECK_FALSE(st.back().growth_flagged);
  }
  CHECK(drift[0] < 1e-6);
  CHECK(drift[0] / drift[1] > 16.0);
}

TEST_CASE("stability precheck and growth flag") {
  const auto b = build_basis(2, 40);
  GalerkinSystem sys(b, coupling_matrix(b, zero_drift(b)), 0.1);
  GalerkinState s0;
  s0.coeffs.assign(b.size(), 1.0);
  CHECK_THROWS_AS(galerkin_step(s0, sys, 10.0), std::invalid_argument);
  // A non-antisymmetric generator may increase the energy.
  CouplingMatrix grow;
  grow.a = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(b.size()), static_cast<Eigen::Index>(b.size())) * 50.0;
  GalerkinSystem bad(b, grow, 0.0);
  CHECK(galerkin_step(s0, bad, 0.001).growth_flagged);
}

TEST_CASE("energy identity") {
  const auto b = build_basis(2, 20);
  GalerkinSystem zero_sys(b, coupling_matrix(b, zero_drift(b)), 0.0);
  GalerkinState one;
  one.coeffs.assign(b.size(), 0.0);
  one.coeffs[0] = 1.0;
  const auto single = galerkin_run(one, zero_sys, 0.005, 1.0);
  CHECK(std::abs(galerkin_energy_identity(single, zero_sys)) < 1e-10);
  CHECK(galerkin_energy_identity(single, zero_sys, 5, 5) == 0.0);

  const auto a = coupling_matrix(b, drift_from_stream(b, random_stream_function(3, 3.0, 9)));
  GalerkinSystem sys(b, a, 0.01);
  GalerkinState s0;
  s0.epsilon = 0.01;
  for (std::size_t k = 0; k < b.size(); ++k) s0.coeffs.push_back(std::sin(1.0 + k));
  std::vector<double> res;
  for (double dt : {0.02, 0.01, 0.005}) res.push_back(std::abs(galerkin_energy_identity(galerkin_run(s0, sys, dt, 1.0), sys)));
  CHECK(std::log2(res[0] / res[1]) > 3.5);
  CHECK(std::log2(res[1] / res[2]) > 3.5);
}

TEST_CASE("truncated energies obey the level-set inequality") {
  const auto b = build_basis(2, 12, 64);
  GalerkinSystem sys(b, coupling_matrix(b, zero_drift(b)), 0.0);
  GalerkinState s0;
  s0.coeffs.assign(b.size(), 0.0);
  s0.coeffs[0] = 1.0;
  s0.coeffs[3] = 0.3;
  const auto states = galerkin_run(s0, sys, 0.01, 0.5);
  const auto theta = b.reconstruct(s0.coeffs);
  const double hi = *std::max_element(theta.begin(), theta.end());
  const auto rep = galerkin_truncation_check(b, sys, states, {-INFINITY, 0.1, 0.3, hi + 1.0});
  REQUIRE(rep.size() == 4);
  CHECK(rep[0].residual == doctest::Approx(galerkin_energy_identity(states, sys)));
  CHECK(rep[0].status == "pass");
  CHECK(rep[1].residual <= rep[1].tolerance);
  CHECK(rep[2].residual <= rep[2].tolerance);
  CHECK(rep[1].status != "fail");
  CHECK(rep[3].lhs == 0.0);
  CHECK(rep[3].rhs == 0.0);
  CHECK(rep[3].status == "pass");
}

TEST_CASE("spectral convergence in k_max") {
  // Analytic data and drift; the difference between k and 2k truncations shrinks fast.
  auto solve = [](std::size_t kmax) {
    const auto b = build_basis(2, kmax, 96);
    const auto a = coupling_matrix(b, drift_from_stream(b, random_stream_function(2, 0.5, 3)));
    GalerkinSystem sys(b, a, 0.0);
    std::vector<double> init(b.quadrature_size());
    for (std::size_t p = 0; p < init.size(); ++p) {
      const auto x = b.point(p);
      init[p] = std::sin(x[0]) * std::sin(x[1]) * std::exp(std::cos(x[0]));
    }
    GalerkinState s0;
    s0.coeffs = b.project(init);
    return b.reconstruct(galerkin_run(s0, sys, 0.005, 0.2).back().coeffs);
  };
  const auto u8 = solve(8), u16 = solve(16), u32 = solve(32), u64 = solve(64);
  auto dist = [](const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
    return std::sqrt(s);
  };
  const double d1 = dist(u8, u16), d2 = dist(u16, u32), d3 = dist(u32, u64);
  CHECK(d2 < d1);
  CHECK(d3 < d2);
  // Successive reduction factors grow, as expected for faster-than-algebraic decay.
  CHECK(d1 / d2 > 2.0);
  CHECK(d2 / d3 > 2.0);
}
