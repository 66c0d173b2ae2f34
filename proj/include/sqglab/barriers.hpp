#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace sqglab {

/// Dirichlet problem on a box with spacing h on every axis. The last axis
/// (the "layer" axis) carries data on its two end faces; every other face is
/// zero. Unknowns are the interior nodes; `transverse` lists the number of
/// intervals on each zero-data axis and `layers` the intervals on the layer axis.
/// bottom/top hold the data on interior transverse nodes (row-major).
struct LayeredLaplace {
  std::vector<std::size_t> transverse;
  std::size_t layers = 0;
  std::vector<double> bottom;
  std::vector<double> top;
};

/// Five/seven-point Laplacian solved exactly by a sine transform across the
/// transverse axes and a tridiagonal sweep along the layer axis. Returns the
/// interior solution, layer-major. Throws std::runtime_error if the discrete
/// residual exceeds 1e-9 times the data scale.
std::vector<double> solve_layered_laplace(const LayeredLaplace& problem);

/// Harmonic in the half strip [0, inf) x [0, 1] with value `boundary_value`
/// on x = 0 and 0 on z = 0, 1. The series keeps the first p_max odd modes.
struct BarrierB2 {
  int p_max = 50;
  double boundary_value = 2.0;
};

struct BarrierValue {
  double value;
  /// Bound on the dropped terms; infinite at x = 0 where the series converges only conditionally.
  double tail_bound;
};

/// Throws std::invalid_argument for x < 0, z outside [0, 1] or p_max < 1.
BarrierValue barrier_b2_eval(const BarrierB2& b, double x, double z);

struct DecayScan {
  std::vector<double> x;
  /// max_z |b2(x, z)| e^{pi x}
  std::vector<double> profile;
  double scan_max;
  double argmax_x;
  /// 4 boundary_value / pi, the limit of the profile as x -> infinity.
  double asymptote;
  /// Bound valid for every x > 0: max(scan_max, asymptote). The profile rises
  /// towards the asymptote, so the scan alone would undershoot.
  double c_bar;
  /// profile nondecreasing on the part of the grid with x >= 0.5
  bool nondecreasing_tail;
};

DecayScan barrier_b2_decay_check(const BarrierB2& b, const std::vector<double>& xs, std::size_t z_samples = 201);

/// Node values of the finite-difference solution of the b2 problem on
/// [0, x_max] x [0, 1] (zero data at x = x_max).
struct B2Grid {
  double h;
  std::size_t nx;  // intervals along x
  std::size_t nz;  // intervals along z
  std::vector<double> values;  // (nx + 1) x (nz + 1), x slowest

  double at(std::size_t ix, std::size_t iz) const { return values[ix * (nz + 1) + iz]; }
};

B2Grid barrier_b2_finite_difference(double h, double x_max = 6.0, double boundary_value = 2.0);

struct B2OracleComparison {
  double h;
  /// Largest |series - FD(h)| over the comparison lattice.
  double max_error;
  /// Largest Richardson estimate |FD(h) - FD(2h)| / 3 of the FD error at the same points.
  double max_estimate;
  /// Largest error / (estimate + series tail bound + bound on the effect of cutting the strip at x_max).
  double worst_ratio;
  std::size_t points;
};

/// Series against the finite-difference oracle on the lattice x in {1/4, 1/2, ..., x_max - 1/4},
/// z in {1/4, 1/2, 3/4}, away from the corners where the boundary data jump. Uses the series
/// boundary value. h must divide 1/8.
B2OracleComparison barrier_b2_oracle_check(const BarrierB2& b, double h, double x_max = 6.0);

/// Harmonic in [-4, 4]^N x [0, 4], equal to 2 on every face except z = 0 where it vanishes.
struct BarrierB1 {
  std::size_t dim;
  std::size_t resolution;  // intervals per x axis
  double h;
  /// All nodes including the boundary: (resolution + 1)^N x (resolution / 2 + 1), z slowest.
  std::vector<double> values;
  double max_inner;  // max over nodes of [-2, 2]^N x [0, 2]
  double lambda;     // (2 - max_inner) / 4
  double residual;   // max discrete Laplacian over interior nodes

  std::size_t index(const std::vector<std::size_t>& ix, std::size_t iz) const;
};

/// Throws std::invalid_argument unless resolution >= 32 is a multiple of 4 and dim is 1 or 2.
BarrierB1 solve_barrier_b1(std::size_t resolution, std::size_t dim = 1);

struct ConstantsLedger {
  std::size_t dim;
  double lambda;
  double delta;
  double cap;  // M
  double c_bar;
  double energy_constant;  // C in C0
  double c0;
  double poisson_l2;
};

/// delta: largest multiple of 1e-3 in (0, 1/4] satisfying the first inequality
/// for k = 1..64; M from the closing sup formula. Throws std::invalid_argument
/// if no delta works or the inputs are out of range.
ConstantsLedger constants_ledger_build(double lambda, std::size_t dim, double energy_constant, double c_bar,
                                       std::optional<double> poisson_l2 = std::nullopt);

struct LedgerVerification {
  bool first = true;   // N C_bar exp(-pi 2^{-k} / delta^k) <= lambda 2^{-k-2}
  bool second = true;  // M^{-k} delta^{-k-1} ||P(1)|| <= lambda 2^{-k-2}
  bool third = true;   // M^{-k} >= C0^k M^{-(1+1/N)(k-3)} for k >= 12N
  /// Smallest log-domain margin (rhs - lhs) seen for each inequality.
  double margin[3];
  std::size_t k_max;
  std::size_t third_from;
  std::size_t third_to;

  bool all() const { return first && second && third; }
};

/// Checks k = 1..k_max (third inequality on 12N..max(k_max, 24N)) in log form.
LedgerVerification constants_ledger_verify(const ConstantsLedger& ledger, std::size_t k_max = 64);

/// Node samples on [-1, 1]^dim with n intervals per axis (axis 0 slowest).
struct NodeField {
  std::size_t dim;
  std::size_t n;
  std::vector<double> values;

  double spacing() const { return 2.0 / static_cast<double>(n); }
};

NodeField sample_nodes(std::size_t dim, std::size_t n, const std::function<double(const std::vector<double>&)>& f);

struct IsoperimetricResult {
  double measure_below;   // |{omega <= 0}|
  double measure_above;   // |{omega >= 1}|
  double measure_between; // |{0 < omega < 1}|
  double gradient_norm;   // ||grad omega||_{L^2}
  double lhs;
  double rhs;
  double ratio;  // lhs / rhs; 0 when lhs = 0, infinite when only rhs vanishes
};

/// Cells are classified by the mean of their corner values; the gradient
/// norm is the exact integral for the multilinear interpolant.
IsoperimetricResult isoperimetric_check(const NodeField& omega);

struct CorpusResult {
  double max_ratio;
  std::size_t argmax;
  std::vector<double> ratios;
};

/// Reproducible corpus of smooth random fields, ramps and bumps; fields are
/// defined as continuous functions so every resolution samples the same set.
std::vector<std::function<double(const std::vector<double>&)>> isoperimetric_corpus(std::size_t dim,
                                                                                     std::size_t count,
                                                                                     std::uint64_t seed);
CorpusResult isoperimetric_sweep(std::size_t dim, std::size_t n,
                                 const std::vector<std::function<double(const std::vector<double>&)>>& corpus);

}  // namespace sqglab
