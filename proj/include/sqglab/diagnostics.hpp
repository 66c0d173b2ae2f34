#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sqglab/grid.hpp"
#include "sqglab/solver.hpp"

namespace sqglab {

enum class CheckStatus { pass, fail, inconclusive };
const char* to_string(CheckStatus s);

/// One verified inequality or identity.
struct CheckResult {
  std::string name;
  /// Plain-language statement of the property being measured.
  std::string property;
  CheckStatus status = CheckStatus::pass;
  double residual = 0.0;
  double tolerance = 0.0;
  /// Where the inputs came from (run parameters, seeds, grid).
  std::string inputs;
  std::string note;
  std::map<std::string, double> values;
};

struct DiagnosticsReport {
  std::vector<CheckResult> checks;

  void add(CheckResult r) { checks.push_back(std::move(r)); }
  bool any_failed() const;
  /// JSON document with one object per check; non-finite numbers become null.
  std::string to_json() const;
};

/// Pointwise (theta - level)_+.
PhysicalField truncate(const PhysicalField& theta, double level);

struct LevelSetResult {
  double level;
  double lhs;  // int gamma^2(t2) + 2 kappa int int |Lambda^{beta/2} gamma|^2
  double rhs;  // int gamma^2(t1)
  double residual;
  double tolerance;
  /// Difference between the fourth-order and plain trapezoid time rules.
  double quadrature_estimate;
  CheckStatus status;
};

struct LevelSetOptions {
  /// Relative to ||theta_0||^2.
  double relative_tolerance = 1e-5;
  /// Spectral work on truncated fields happens on a grid refined by this factor.
  std::size_t refine = 2;
};

/// Level-set energy inequality between two snapshot times for every level.
/// The dissipation integral uses the endpoint-corrected trapezoid rule with
/// d/dt ||Lambda^{beta/2} gamma||^2 evaluated from the equation; a level of
/// -infinity checks the untruncated energy law.
std::vector<LevelSetResult> level_set_sweep(const Trajectory& traj, const std::vector<double>& levels, double t1,
                                            double t2, const LevelSetOptions& opt = {});
LevelSetResult level_set_energy_check(const Trajectory& traj, double level, double t1, double t2,
                                      const LevelSetOptions& opt = {});

/// `count` levels evenly spaced over [min theta_0, max theta_0].
std::vector<double> spanning_levels(const PhysicalField& theta, std::size_t count);

struct LevelSetLedger {
  double cap;     // M
  double t0;
  std::vector<double> levels;  // C_k = M (1 - 2^{-k})
  std::vector<double> times;   // T_k = t0 (1 - 2^{-k})
  /// U_k with the time integral cut at the end of the run.
  std::vector<double> energies;
  /// Upper end of the interval for U_k: adds int theta_k^2(t_end), which bounds the neglected tail.
  std::vector<double> energies_upper;
  /// Space-time measure of {theta_k > 0} and the Chebyshev bound int int (2^k theta_{k-1} / M)^{2/N} on [T_{k-1}, t_end].
  std::vector<double> chebyshev_lhs;
  std::vector<double> chebyshev_rhs;
  double initial_energy;  // ||theta_0||^2
  std::size_t dim;
};

/// Throws std::invalid_argument if t0 is not inside (0, t_end) or cap <= 0.
LevelSetLedger uk_sequence(const Trajectory& traj, double cap, double t0, std::size_t levels,
                           std::size_t refine = 2);

struct RecursionReport {
  /// Smallest C with U_k <= C 2^{(N+2)k/N} U_{k-1}^{(N+1)/N} for all k.
  double fitted_constant;
  /// fitted_constant * t0 * M^{2/N}: the constant in front of the recursion with time and level scaling removed.
  double normalised_constant;
  bool monotone;
  bool geometric_decay;  // U_k <= U_{k-1} / 2 for every k checked
  bool below_threshold;  // U_0 small enough for the recursion to force U_k -> 0
  bool chebyshev_ok;
  /// Set when some U_{k-1} = 0 while U_k > 0.
  bool implication_violated;
  std::size_t checked_levels;
};

RecursionReport uk_recursion_check(const LevelSetLedger& ledger, std::size_t max_level = 0);

struct LinfDecayResult {
  double constant;  // sup T^{N/2} ||theta(T)||_inf / ||theta_0||_{L^2}
  double argmax_time;
  /// Largest share of spectral energy in the outer half of the dealiased band over the window.
  double spectral_tail;
  CheckStatus status;
};

LinfDecayResult linf_decay_check(const Trajectory& traj, double t_min, double t_max, double tail_tolerance = 1e-4);

/// Convex test function with its derivative.
struct ConvexFunction {
  std::string name;
  std::function<double(double)> value;
  std::function<double(double)> derivative;
};

ConvexFunction square_function();
ConvexFunction linear_function(double slope, double offset);
/// width * log(1 + exp((s - level) / width)): a smooth convex surrogate for (s - level)_+.
ConvexFunction smoothed_positive_part(double level, double width);

struct CordobaResult {
  /// phi'(theta) Lambda theta - Lambda phi(theta) on the refined grid; never negative in exact arithmetic.
  PhysicalField residual;
  double min_residual;
  double scale;
  double tolerance;
  /// Bound on the contribution of barely resolved modes of phi(theta) to Lambda phi(theta).
  double aliasing_allowance;
  CheckStatus status;
};

/// Throws std::invalid_argument if phi fails a sampled convexity test on the range of theta.
CordobaResult cordoba_pointwise_check(const PhysicalField& theta, const ConvexFunction& phi, std::size_t refine = 4);

/// Smooth cutoff supported in B_2 x [0, 2), centred at `centre` on the torus:
///   eta = prod_a b(x_a - c_a) * b(z),  b(s) = exp(1 - 1/(1 - (s/2)^2)) on |s| < 2.
struct LocalCutoff {
  std::vector<double> centre;
  double radius = 2.0;
};

struct LocalEnergyResult {
  /// Inputs to the inequality, integrated over [t1, t2].
  double extension_energy;     // kappa int int |grad(eta [theta*]_+)|^2
  double cutoff_energy;        // kappa int int (|grad eta| [theta*]_+)^2
  double boundary_cutoff;      // int int (|grad eta| [theta]_+)^2 on z = 0
  double mass_t1;              // int (eta [theta]_+)^2 (t1)
  double mass_t2;
  /// Smallest Phi for the proof form with the 1/2-weighted masses.
  double phi_hat;
  /// Smallest Phi for the form with unweighted masses.
  double phi_hat_stated;
  double bmo_bound;   // sup_t BMO seminorm of the drift
  double ball_mean;   // sup_t |int_{B_2} v|
  CheckStatus status;
};

struct LocalEnergyOptions {
  double level = 0.0;              // applies to theta - level
  std::size_t z_count = 129;       // uniform levels on [0, 2]
  double phi_tolerance = 1e-8;     // relative slack before Phi_hat becomes positive
};

/// Requires beta == 1 (the extension realises Lambda) and a domain longer than 4 on every axis.
LocalEnergyResult local_energy_check(const Trajectory& traj, const LocalCutoff& cutoff, double t1, double t2,
                                     const LocalEnergyOptions& opt = {});

/// Max over dyadic sub-cubes of the periodic grid with side >= 2 cells of the
/// mean of |u - cube mean| (Euclidean norm for vector fields).
double bmo_seminorm(const PhysicalField& u);
double bmo_seminorm(const VectorField& u);
/// |int_{centre + B_r} v dx| with B_r = [-r, r]^N on the torus (grid-point sum).
double ball_mean_term(const VectorField& v, const std::vector<double>& centre, double radius = 2.0);

}  // namespace sqglab
