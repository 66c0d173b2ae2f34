#pragma once

#include "sqglab/grid.hpp"

namespace sqglab {

/// Forward transform with the 1/(number of points) factor:
///   coeffs(k) = (1/P) sum_x f(x) exp(-i k'.x).
/// With this convention Parseval reads
///   sum_x |f(x)|^2 * cell_volume = volume * sum_k |coeffs(k)|^2.
/// Throws std::invalid_argument if any value is non-finite.
SpectralField forward(const PhysicalField& f);

/// Inverse transform; returns the real part of the synthesised field.
PhysicalField inverse(const SpectralField& f);

/// Spectral interpolation / restriction onto `target` (same lengths).
/// Modes that exist on both grids are copied, excluding the Nyquist index of
/// the smaller grid on each axis; everything else is zero.
SpectralField resample(const SpectralField& f, const Grid& target);

/// Band-limited upsampling of a physical field by an integer factor.
PhysicalField refine(const PhysicalField& f, std::size_t factor);

}  // namespace sqglab
