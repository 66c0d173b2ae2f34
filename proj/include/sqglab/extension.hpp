#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "sqglab/grid.hpp"

namespace sqglab {

/// Samples of the harmonic extension theta*(x, z) on grid x z-levels.
/// values are z-major: values[iz * grid.total() + i].
struct ExtensionField {
  Grid grid;
  std::vector<double> z_levels;
  std::vector<double> values;

  ExtensionField(Grid g, std::vector<double> z);
  ExtensionField(Grid g, std::vector<double> z, std::vector<double> v);

  std::size_t levels() const { return z_levels.size(); }
  std::span<double> level(std::size_t iz);
  std::span<const double> level(std::size_t iz) const;
  PhysicalField level_field(std::size_t iz) const;
};

/// Throws std::invalid_argument unless z[0] == 0 and z is strictly increasing and finite.
void validate_z_levels(std::span<const double> z);

/// 64 levels: 0, then geometric spacing starting at dz_min and ending at z_max.
std::vector<double> default_z_levels(double dz_min = 1e-3, double z_max = 8.0, std::size_t count = 64);
/// 0, h, 2h, ..., count-1 levels.
std::vector<double> uniform_z_levels(double h, std::size_t count);

/// theta*(., z) has Fourier coefficients theta_hat(k) exp(-|k'| z).
ExtensionField harmonic_extension(const PhysicalField& theta, std::span<const double> z_levels);
ExtensionField harmonic_extension(const SpectralField& theta_hat, std::span<const double> z_levels);

/// -d/dz at z = 0 by the one-sided three-point (second order) formula on
/// levels 0, z1, z2. Requires at least three levels.
PhysicalField normal_derivative_at_boundary(const ExtensionField& ext);

/// P(t, x) = C t / (|x|^2 + t^2)^((N+1)/2), C fixed so the kernel has unit mass.
struct PoissonKernelSpec {
  std::size_t dim = 2;
  double normalization = 0.0;
};

/// Kernel description with C from quadrature of the radial mass integral.
PoissonKernelSpec make_poisson_kernel(std::size_t dim);
/// Gamma((N+1)/2) / pi^((N+1)/2).
double poisson_normalization_closed_form(std::size_t dim);
/// Quadrature of the unnormalised mass of t/(|x|^2+t^2)^((N+1)/2) (independent of t).
double poisson_unit_mass_integral(std::size_t dim);
/// ||P(1, .)||_{L^2(R^N)} by quadrature.
double poisson_kernel_l2_norm(const PoissonKernelSpec& spec);

double poisson_kernel_eval(const PoissonKernelSpec& spec, double t, std::span<const double> x);

/// P(t) * theta on the torus, via the multiplier exp(-|k'| t).
PhysicalField poisson_convolve(const PhysicalField& theta, double t);
/// Direct quadrature with the free-space kernel summed over periodic images
/// |n_a| <= image_radius. Costly: O(P^2 (2R+1)^N). Cross-check only.
PhysicalField poisson_convolve_direct(const PhysicalField& theta, double t, int image_radius);

/// z derivative at every level (three-point non-uniform formula, one-sided at the ends).
ExtensionField z_derivative(const ExtensionField& ext);

/// Components of grad(eta * [theta*]_+) are formed by the chain rule
/// 1_{theta*>0} eta grad(theta*) + [theta*]_+ grad(eta), with x-derivatives
/// spectral per level and z-derivatives by finite differences; the result is
/// integrated with the grid rule in x and the trapezoid rule in z.
/// With no cutoff eta == 1 and no support requirement applies. A cutoff must
/// share the grid and levels and vanish on the top level.
double extension_dirichlet_energy(const ExtensionField& ext, const std::optional<ExtensionField>& cutoff = std::nullopt);

/// int int |grad eta|^2 [theta*]_+^2 dx dz.
double extension_cutoff_gradient_energy(const ExtensionField& ext, const ExtensionField& cutoff);

/// Trapezoid rule in z of per-level grid integrals of `integrand` values (z-major).
double integrate_extension(const Grid& grid, std::span<const double> z, std::span<const double> integrand);

}  // namespace sqglab
