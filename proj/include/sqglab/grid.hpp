#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

namespace sqglab {

/// Uniform periodic grid on the torus [0, L_1) x ... x [0, L_N), N in {1, 2, 3}.
///
/// Values are stored row-major with axis 0 varying slowest. Grid point i along
/// axis a sits at x_a = i * spacing(a).
class Grid {
 public:
  /// Throws std::invalid_argument unless every dim is a power of two >= 8 and
  /// every length is positive and finite. An empty `lengths` means 2*pi per axis.
  explicit Grid(std::vector<std::size_t> dims, std::vector<double> lengths = {});

  std::size_t dim() const { return dims_.size(); }
  std::size_t size(std::size_t axis) const { return dims_.at(axis); }
  double length(std::size_t axis) const { return lengths_.at(axis); }
  double spacing(std::size_t axis) const { return lengths_.at(axis) / static_cast<double>(dims_.at(axis)); }
  const std::vector<std::size_t>& dims() const { return dims_; }
  const std::vector<double>& lengths() const { return lengths_; }

  std::size_t total() const { return total_; }
  double volume() const;
  double cell_volume() const { return volume() / static_cast<double>(total_); }
  double min_spacing() const;

  /// Signed integer wavenumber of FFT index `idx` along `axis`, in [-n/2, n/2 - 1].
  int wavenumber(std::size_t axis, std::size_t idx) const {
    const auto n = dims_[axis];
    return idx < n / 2 ? static_cast<int>(idx) : static_cast<int>(idx) - static_cast<int>(n);
  }
  /// Physical wavevector component 2*pi*m / L.
  double wavevector(std::size_t axis, std::size_t idx) const;
  bool is_nyquist(std::size_t axis, std::size_t idx) const { return idx == dims_[axis] / 2; }

  /// Largest |k'| over all resolved modes (used for tolerance scaling).
  double max_wavevector() const;

  std::size_t flat(std::array<std::size_t, 3> idx) const;
  std::array<std::size_t, 3> unflat(std::size_t flat) const;

  /// Grid with every dim multiplied by `factor` (same lengths).
  Grid refined(std::size_t factor) const;

  bool operator==(const Grid& other) const = default;

 private:
  std::vector<std::size_t> dims_;
  std::vector<double> lengths_;
  std::size_t total_ = 0;
};

/// Real samples of a scalar field on a Grid.
struct PhysicalField {
  Grid grid;
  std::vector<double> values;
  std::optional<double> time_tag;

  /// Zero field.
  explicit PhysicalField(Grid g);
  /// Throws std::invalid_argument on size mismatch.
  PhysicalField(Grid g, std::vector<double> v, std::optional<double> t = std::nullopt);

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
};

/// Fourier coefficients in FFTW index order; coeffs[flat] is the mode with
/// wavenumbers (grid.wavenumber(a, idx_a))_a. Normalised so that
/// f(x) = sum_k coeffs(k) * exp(i k'.x).
struct SpectralField {
  Grid grid;
  std::vector<std::complex<double>> coeffs;

  explicit SpectralField(Grid g);
  SpectralField(Grid g, std::vector<std::complex<double>> c);
};

using VectorField = std::vector<PhysicalField>;

/// Evaluates `fn(x)` at every grid point (x as a 3-array; unused axes are 0).
template <class Fn>
PhysicalField sample(const Grid& grid, Fn&& fn) {
  PhysicalField f(grid);
  for (std::size_t i = 0; i < grid.total(); ++i) {
    const auto idx = grid.unflat(i);
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (std::size_t a = 0; a < grid.dim(); ++a) x[a] = static_cast<double>(idx[a]) * grid.spacing(a);
    f.values[i] = fn(x);
  }
  return f;
}

/// Calls fn(flat_index, k') for every mode, with k' the physical wavevector
/// (unused components 0) and m the integer wavenumbers.
template <class Fn>
void for_each_mode(const Grid& grid, Fn&& fn) {
  const std::size_t n0 = grid.size(0);
  const std::size_t n1 = grid.dim() > 1 ? grid.size(1) : 1;
  const std::size_t n2 = grid.dim() > 2 ? grid.size(2) : 1;
  std::size_t flat = 0;
  for (std::size_t i = 0; i < n0; ++i) {
    for (std::size_t j = 0; j < n1; ++j) {
      for (std::size_t l = 0; l < n2; ++l, ++flat) {
        std::array<std::size_t, 3> idx{i, j, l};
        std::array<double, 3> k{0.0, 0.0, 0.0};
        std::array<int, 3> m{0, 0, 0};
        for (std::size_t a = 0; a < grid.dim(); ++a) {
          m[a] = grid.wavenumber(a, idx[a]);
          k[a] = grid.wavevector(a, idx[a]);
        }
        fn(flat, k, m, idx);
      }
    }
  }
}

}  // namespace sqglab
