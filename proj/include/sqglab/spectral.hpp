#pragma once

#include <complex>
#include <functional>

#include "sqglab/grid.hpp"

namespace sqglab {

/// Multiplies each coefficient by |k'|^beta; the k = 0 mode is zeroed for
/// beta > 0 and kept for beta = 0. Requires beta in [0, 2].
SpectralField fractional_laplacian(const SpectralField& f, double beta);
PhysicalField fractional_laplacian(const PhysicalField& f, double beta);

/// Riesz transform along `axis` (0-based): multiplier i k_axis / |k|, zero at
/// k = 0 and on the Nyquist plane of `axis`.
SpectralField riesz_transform(const SpectralField& f, std::size_t axis);

/// Spectral derivative i k_axis (Nyquist plane of `axis` zeroed).
SpectralField derivative(const SpectralField& f, std::size_t axis);

VectorField gradient(const PhysicalField& f);
PhysicalField divergence(const VectorField& v);

/// 2/3 rule: zero every mode with |m_a| > n_a / 3 on some axis.
SpectralField dealias(const SpectralField& f);
/// True if no coefficient beyond the 2/3 band exceeds `tol` in magnitude.
bool is_dealiased(const SpectralField& f, double tol = 0.0);

/// Homogeneous Sobolev seminorm squared: volume * sum_k |k'|^(2s) |c_k|^2.
double sobolev_seminorm_sq(const SpectralField& f, double s);
/// ||Lambda^{1/2} f||^2_{L^2}.
double h_half_seminorm(const SpectralField& f);

/// Generic diagonal multiplier; `symbol(k', m)` receives physical and integer wavevectors.
SpectralField apply_multiplier(const SpectralField& f,
                               const std::function<std::complex<double>(const std::array<double, 3>&,
                                                                         const std::array<int, 3>&)>& symbol);

// Quadrature on the grid.
double integral(const PhysicalField& f);
double mean(const PhysicalField& f);
double l2_norm_sq(const PhysicalField& f);
double l2_norm(const PhysicalField& f);
double linf_norm(const PhysicalField& f);
double linf_norm(const VectorField& v);  // max pointwise Euclidean norm
double inner(const PhysicalField& a, const PhysicalField& b);
/// volume * sum |c_k|^2, equal to l2_norm_sq of the inverse transform.
double l2_norm_sq(const SpectralField& f);

/// Largest |c(k) - conj(c(-k))|.
double conjugate_symmetry_defect(const SpectralField& f);

/// Throws std::invalid_argument if any value is NaN or infinite.
void require_finite(const PhysicalField& f, const char* what);

// Small pointwise helpers used throughout.
PhysicalField operator+(const PhysicalField& a, const PhysicalField& b);
PhysicalField operator-(const PhysicalField& a, const PhysicalField& b);
PhysicalField operator*(double s, const PhysicalField& a);
PhysicalField add_constant(const PhysicalField& a, double c);

}  // namespace sqglab
