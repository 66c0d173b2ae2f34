#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "sqglab/fft.hpp"
#include "sqglab/grid.hpp"
#include "sqglab/spectral.hpp"

namespace testutil {

// Random trigonometric polynomial with |m_a| <= kmax, built by direct
// summation in physical space (no FFT involved).
inline sqglab::PhysicalField random_trig(const sqglab::Grid& g, unsigned seed, int kmax = 4, bool zero_mean = false) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  struct Term {
    std::array<int, 3> m;
    double a, b;
  };
  std::vector<Term> terms;
  const int ky = g.dim() > 1 ? kmax : 0;
  const int kz = g.dim() > 2 ? kmax : 0;
  for (int i = 0; i <= kmax; ++i)
    for (int j = -ky; j <= ky; ++j)
      for (int l = -kz; l <= kz; ++l) {
        if (i == 0 && (j < 0 || (j == 0 && l < 0))) continue;
        const bool dc = i == 0 && j == 0 && l == 0;
        if (dc && zero_mean) continue;
        const double damp = 1.0 / (1.0 + i * i + j * j + l * l);
        terms.push_back({{i, j, l}, u(rng) * damp, dc ? 0.0 : u(rng) * damp});
      }
  return sqglab::sample(g, [&](const std::array<double, 3>& x) {
    double s = 0.0;
    for (const auto& t : terms) {
      double ph = 0.0;
      for (std::size_t a = 0; a < g.dim(); ++a) ph += 2.0 * std::numbers::pi * t.m[a] * x[a] / g.length(a);
      s += t.a * std::cos(ph) + t.b * std::sin(ph);
    }
    return s;
  });
}

inline double max_abs_diff(const sqglab::PhysicalField& a, const sqglab::PhysicalField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs(const sqglab::PhysicalField& a) {
  double m = 0.0;
  for (double x : a.values) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace testutil

namespace testutil {

// Divergence-free drift (-d_2 psi, d_1 psi) from a random trigonometric stream function.
inline sqglab::VectorField velocity_stream(const sqglab::Grid& g, unsigned seed, int kmax = 4) {
  const auto psi = random_trig(g, seed, kmax);
  const auto hat = sqglab::forward(psi);
  auto u = sqglab::inverse(sqglab::derivative(hat, 1));
  for (auto& x : u.values) x = -x;
  return {u, sqglab::inverse(sqglab::derivative(hat, 0))};
}

}  // namespace testutil
