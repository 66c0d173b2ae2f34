#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace sqglab {

/// One Dirichlet eigenfunction of the box (0, pi)^N:
///   sigma(x) = (2/pi)^{N/2} prod_a sin(m_a x_a),  -Delta sigma = |m|^2 sigma.
struct EigenMode {
  std::vector<int> index;
  double eigenvalue;  // |m|^2
  double frequency;   // |m|, the action of the half Laplacian
};

/// First `k_max` product-sine modes ordered by eigenvalue (ties broken
/// lexicographically), with a tensor midpoint quadrature of Q points per axis.
class EigenBasis {
 public:
  EigenBasis(std::size_t dim, std::size_t k_max, std::size_t quadrature = 0);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return modes_.size(); }
  const std::vector<EigenMode>& modes() const { return modes_; }
  const EigenMode& mode(std::size_t k) const { return modes_.at(k); }
  int max_index() const { return max_index_; }

  std::size_t quadrature_points() const { return q_; }
  std::size_t quadrature_size() const { return total_; }
  double quadrature_weight() const { return weight_; }
  /// Midpoint coordinates along one axis: (j + 1/2) pi / Q.
  const std::vector<double>& nodes() const { return nodes_; }
  /// Point p of the tensor grid (axis 0 slowest).
  std::array<double, 3> point(std::size_t p) const;

  double eval(std::size_t k, const std::array<double, 3>& x) const;
  /// sigma_k at every quadrature point (length quadrature_size()).
  std::vector<double> samples(std::size_t k) const;
  /// d sigma_k / dx_axis at every quadrature point.
  std::vector<double> gradient_samples(std::size_t k, std::size_t axis) const;

  Eigen::MatrixXd gram() const;
  double orthonormality_defect() const;

  /// theta(x_p) = sum_k f_k sigma_k(x_p).
  std::vector<double> reconstruct(const std::vector<double>& coeffs) const;
  /// f_k = sum_p w theta(x_p) sigma_k(x_p).
  std::vector<double> project(const std::vector<double>& values) const;

 private:
  std::size_t dim_;
  std::size_t q_;
  std::size_t total_;
  double weight_;
  double norm_;
  int max_index_ = 0;
  std::vector<EigenMode> modes_;
  std::vector<double> nodes_;
  // Per-axis tables sin(m x_j), cos(m x_j) for m = 0..max_index.
  std::vector<std::vector<double>> sin_table_;
  std::vector<std::vector<double>> cos_table_;
  Eigen::MatrixXd sample_matrix_;  // quadrature_size x size
};

/// Throws std::invalid_argument if k_max == 0, dim is outside 1..3, or the
/// quadrature has fewer than 4 points per unit of the highest mode index.
EigenBasis build_basis(std::size_t dim, std::size_t k_max, std::size_t quadrature = 0);

/// Drift sampled at the basis quadrature points, one vector per component.
struct BoxDrift {
  std::vector<std::vector<double>> components;
};

BoxDrift zero_drift(const EigenBasis& basis);
BoxDrift sample_drift(const EigenBasis& basis, const std::function<std::array<double, 3>(const std::array<double, 3>&)>& v);

/// 2D stream function psi = sum c_pq sin(p x) sin(q y); its drift
/// (-d_y psi, d_x psi) is divergence free and tangential on the boundary.
struct StreamFunction {
  std::vector<std::array<int, 2>> modes;
  std::vector<double> coeffs;
};

StreamFunction random_stream_function(int max_mode, double amplitude, std::uint64_t seed);
/// Least-squares sine coefficients (modes below Q/2 per axis) from samples at the quadrature points.
StreamFunction stream_from_samples(const EigenBasis& basis, const std::vector<double>& values);
BoxDrift drift_from_stream(const EigenBasis& basis, const StreamFunction& psi);

struct CouplingMatrix {
  Eigen::MatrixXd a;
  /// max |a_kl + a_lk|
  double antisymmetry_defect = 0.0;
  /// True when the defect is below the 1e-8 acceptance bound.
  bool antisymmetric = false;
};

/// a_kl = int v . grad(sigma_k) sigma_l dx by quadrature.
CouplingMatrix coupling_matrix(const EigenBasis& basis, const BoxDrift& v);

struct GalerkinState {
  std::vector<double> coeffs;
  double time = 0.0;
  double epsilon = 0.0;
  /// Set when a step increased sum f_k^2, which the exact flow never does.
  bool growth_flagged = false;
};

/// Linear generator f' = G f with G = -diag(eps |m|^2 + |m|) + a (the
/// damping row can be switched off to test the transport part alone).
struct GalerkinSystem {
  Eigen::MatrixXd generator;
  std::vector<double> damping;

  GalerkinSystem(const EigenBasis& basis, const CouplingMatrix& a, double epsilon, bool dissipation = true);
  /// Upper bound on the spectral radius (row-sum norm).
  double spectral_bound() const;
  std::vector<double> apply(const std::vector<double>& f) const;
};

/// Classical RK4. Throws std::invalid_argument if dt times the spectral
/// bound exceeds 2.5 (inside the RK4 stability region on both axes).
GalerkinState galerkin_step(const GalerkinState& state, const GalerkinSystem& system, double dt);

/// Every step from t = state.time for ceil((t_end - t)/dt) steps.
std::vector<GalerkinState> galerkin_run(const GalerkinState& initial, const GalerkinSystem& system, double dt,
                                        double t_end);

/// sum f_k^2(i2) - sum f_k^2(i1) + 2 int sum d_k f_k^2 over states [i1, i2],
/// with an endpoint-corrected trapezoid rule in time (fourth order).
double galerkin_energy_identity(const std::vector<GalerkinState>& states, const GalerkinSystem& system,
                                std::size_t i1, std::size_t i2);
double galerkin_energy_identity(const std::vector<GalerkinState>& states, const GalerkinSystem& system);

struct TruncationLevelResult {
  double level;
  double lhs;
  double rhs;
  double residual;  // lhs - rhs; the inequality asks for <= 0
  double tolerance;
  double projection_error;  // relative energy of (theta - level)_+ outside the measured modes
  std::string status;       // "pass", "fail" or "inconclusive"
};

/// Checks int gamma^2(t2) + 2 int int (|Lambda^{1/2} gamma|^2 + eps |grad gamma|^2)
///   <= int gamma^2(t1), gamma = (theta - level)_+,
/// on the reconstructed solution, measuring gamma in the sine modes below Q/2.
/// A level of -infinity reports the energy identity instead.
std::vector<TruncationLevelResult> galerkin_truncation_check(const EigenBasis& basis, const GalerkinSystem& system,
                                                             const std::vector<GalerkinState>& states,
                                                             const std::vector<double>& levels,
                                                             double projection_tolerance = 1e-3);

}  // namespace sqglab
