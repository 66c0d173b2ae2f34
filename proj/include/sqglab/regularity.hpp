#pragma once

#include <optional>
#include <vector>

#include "sqglab/grid.hpp"
#include "sqglab/solver.hpp"

namespace sqglab {

/// [t - depth, t] x (x + [-r, r]^N); depth defaults to r.
struct ParabolicCylinder {
  double t;
  std::vector<double> centre;
  double radius;
  std::optional<double> depth;

  double time_depth() const { return depth ? *depth : radius; }
};

/// Piecewise-linear path x0(s) sampled at snapshot times, unwrapped (not reduced modulo the period).
struct FramePath {
  std::vector<double> times;
  std::vector<std::vector<double>> positions;

  /// Linear interpolation; clamps outside the sampled range.
  std::vector<double> at(double s) const;
};

/// sup - inf of theta over grid points and snapshots inside the cylinder. With
/// a frame, the slice at time s is centred at x + x0(s) - x0(t).
/// Throws std::invalid_argument if the cylinder leaves the sampled time range,
/// does not fit in one period, or is narrower than 4 grid cells.
double oscillation(const Trajectory& traj, const ParabolicCylinder& cyl, const FramePath* frame = nullptr);

/// Exact average of the trigonometric interpolant of each velocity component over x + [-r, r]^N.
std::vector<double> box_average(const VectorField& v, const std::vector<double>& x, double radius);

/// dx0/ds = box_average(v(s), x0, radius) with Heun steps between snapshots
/// (velocity linear in time between them) and x0(t_begin) = 0. A radius of 0
/// selects a quarter of the shortest period.
FramePath moving_frame(const Trajectory& traj, double radius = 0.0);

/// Largest |(x0(s_{i+1}) - x0(s_i)) / h - mean of the box averages at both ends|: the defining-equation residual.
double frame_residual(const Trajectory& traj, const FramePath& frame, double radius = 0.0);

/// theta_bar_k = 2 (theta_bar_{k-1} - 1), k = 1..levels. Throws std::invalid_argument if theta exceeds 2 anywhere.
std::vector<PhysicalField> renormalization_sequence(const PhysicalField& theta, std::size_t levels);
/// 2^k (theta - 2) + 2.
PhysicalField renormalization_closed_form(const PhysicalField& theta, std::size_t k);

struct HolderFit {
  /// Least-squares slope of log osc against log r, clipped to [0, 1.5]; +inf when the field is flat at some radius.
  double alpha;
  double raw_slope;
  double r_squared;
  bool flat;
  bool clipped;
  std::vector<double> radii;
  std::vector<double> oscillations;
};

/// radius_max * 2^{-i} for i = 0..count-1.
std::vector<double> radius_ladder(double radius_max, std::size_t count);

/// Requires at least five radii with max / min >= 10.
HolderFit holder_exponent_fit(const Trajectory& traj, double t, const std::vector<double>& x,
                              const std::vector<double>& radii, const FramePath* frame = nullptr);

}  // namespace sqglab
