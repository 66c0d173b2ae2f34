#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sqglab/grid.hpp"

namespace sqglab {

class CflViolation : public std::runtime_error {
 public:
  CflViolation(double max_speed, double dt, double limit);
  double max_speed;
  double dt;
  double limit;
};

class DivergenceError : public std::invalid_argument {
 public:
  DivergenceError(double residual, double tolerance);
  double residual;
};

/// Named initial-data generators; every generator returns a mean-zero field.
struct InitialCondition {
  enum class Kind { random_band, two_vortex, single_mode };
  Kind kind = Kind::random_band;
  int k_min = 1;
  int k_max = 8;
  /// RMS value for random_band, peak value for two_vortex and single_mode.
  double amplitude = 1.0;
  std::uint64_t seed = 0;
  /// Integer wavevector for single_mode, one entry per axis.
  std::vector<int> mode;
  /// Gaussian width of each vortex as a fraction of the domain length.
  double vortex_width = 0.1;
};

/// Coefficients are drawn per integer wavevector in a grid-independent order,
/// so the same seed produces the same continuous field on every grid that
/// resolves the band.
PhysicalField make_initial_condition(const Grid& grid, const InitialCondition& ic);

enum class DriftMode { sqg, prescribed, zero };

struct SolverConfig {
  Grid grid{{64, 64}};
  double beta = 1.0;
  double kappa = 1.0;
  /// Fixed step; nullopt selects dt from the CFL and stiffness limits every step.
  std::optional<double> dt;
  double t_end = 1.0;
  InitialCondition initial;
  DriftMode drift = DriftMode::sqg;
  /// Steady divergence-free drift, used when drift == prescribed.
  VectorField prescribed_velocity;
  /// Linear Riesz closure u_j = sum_l c_jl R_l theta (row-major N x N); empty
  /// means the SQG law u = (-R_2 theta, R_1 theta).
  std::vector<double> closure;
  bool dealias = true;
  std::size_t snapshot_stride = 1;
  double cfl = 0.5;
  std::size_t max_steps = 10'000'000;
};

/// Throws std::invalid_argument describing the first violated constraint.
void validate(const SolverConfig& config);

/// u = (-R_2 theta, R_1 theta); requires a 2D grid.
VectorField velocity_from_theta(const PhysicalField& theta);
/// u_j = sum_l c_jl R_l theta for an antisymmetric N x N matrix c.
VectorField velocity_from_theta(const PhysicalField& theta, const std::vector<double>& closure);

/// (-d_2 psi, d_1 psi) for a 2D stream function.
VectorField velocity_from_stream_function(const PhysicalField& psi);

/// -v.grad(theta) - kappa Lambda^beta theta, with the product dealiased.
/// Throws DivergenceError if |div v| exceeds 1e-10 (scaled by |v| k_max when larger than 1).
PhysicalField rhs(const PhysicalField& theta, const VectorField& v, double beta, double kappa);

/// Integrating-factor RK4: exp(-kappa |k'|^beta dt) on the linear part, classical RK4 on transport.
class Integrator {
 public:
  explicit Integrator(SolverConfig config);

  const SolverConfig& config() const { return config_; }
  /// Transport term -P(v.grad theta) in spectral space (mean mode zeroed).
  SpectralField nonlinear(const SpectralField& theta_hat) const;
  VectorField velocity(const SpectralField& theta_hat) const;
  double max_speed(const SpectralField& theta_hat) const;
  /// kappa |k'|^beta per mode.
  const std::vector<double>& linear_symbol() const { return symbol_; }

  /// One step; `n0` is nonlinear(theta_hat) when already known.
  SpectralField advance(const SpectralField& theta_hat, double dt, const SpectralField* n0 = nullptr) const;
  /// Step limit from the CFL condition (infinite when the drift vanishes).
  double cfl_limit(double max_speed) const;
  /// dt used in auto mode: min(cfl limit, dx^beta / kappa).
  double auto_dt(double max_speed) const;

 private:
  SolverConfig config_;
  std::vector<double> symbol_;
  SpectralField zero_;
  std::vector<SpectralField> drift_hat_;
};

struct State {
  SpectralField theta_hat;
  double time = 0.0;
  std::size_t step = 0;
};

/// Advances by dt; throws CflViolation if dt exceeds cfl * dx / max|u|.
State step(const Integrator& integrator, const State& state, double dt);

struct StepScalars {
  double time;
  double l2;
  double linf;
  double hhalf;
  double umax;
  /// Cumulative E(t) - E(0) + 2 kappa int_0^t ||Lambda^{beta/2} theta||^2.
  double energy_residual;
};

struct Snapshot {
  std::size_t step;
  double time;
  PhysicalField theta;
};

struct Trajectory {
  SolverConfig config;
  std::vector<Snapshot> snapshots;
  std::vector<StepScalars> scalars;
  bool aborted = false;
  std::string abort_reason;

  const PhysicalField& initial() const { return snapshots.front().theta; }
  double t_begin() const { return snapshots.front().time; }
  double t_final() const { return snapshots.back().time; }
  VectorField velocity_at(std::size_t snapshot) const;
  /// Index of the snapshot whose time matches t (to 1e-9 relative); throws otherwise.
  std::size_t snapshot_at(double t) const;
};

/// Integrates to config.t_end. A non-finite state stops the run and returns
/// the partial trajectory with `aborted` set.
Trajectory run(const SolverConfig& config);

/// Sup-norm gap between theta(t) and its mild-solution form: the dissipative
/// semigroup applied to theta_0 plus the semigroup-weighted time integral of the
/// transport term. Uses every `stride`-th snapshot, with the transport term
/// interpolated linearly in time and integrated exactly against the kernel.
/// Throws std::invalid_argument for t outside the trajectory.
double duhamel_residual(const Trajectory& traj, double t, std::size_t stride = 1);

}  // namespace sqglab
