#include "sqglab/grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sqglab {

namespace {
bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }
}  // namespace

Grid::Grid(std::vector<std::size_t> dims, std::vector<double> lengths)
    : dims_(std::move(dims)), lengths_(std::move(lengths)) {
  if (dims_.empty() || dims_.size() > 3) {
    throw std::invalid_argument("grid dimension must be 1, 2 or 3, got " + std::to_string(dims_.size()));
  }
  if (lengths_.empty()) lengths_.assign(dims_.size(), 2.0 * std::numbers::pi);
  if (lengths_.size() != dims_.size()) {
    throw std::invalid_argument("grid lengths must match dims (" + std::to_string(lengths_.size()) + " vs " +
                                std::to_string(dims_.size()) + ")");
  }
  total_ = 1;
  for (std::size_t a = 0; a < dims_.size(); ++a) {
    if (dims_[a] < 8 || !is_power_of_two(dims_[a])) {
      throw std::invalid_argument("grid dims must be powers of two >= 8, axis " + std::to_string(a) + " has " +
                                  std::to_string(dims_[a]));
    }
    if (!(lengths_[a] > 0.0) || !std::isfinite(lengths_[a])) {
      throw std::invalid_argument("grid length must be positive and finite on axis " + std::to_string(a));
    }
    total_ *= dims_[a];
  }
}

double Grid::volume() const {
  double v = 1.0;
  for (double l : lengths_) v *= l;
  return v;
}

double Grid::min_spacing() const {
  double h = spacing(0);
  for (std::size_t a = 1; a < dim(); ++a) h = std::min(h, spacing(a));
  return h;
}

double Grid::wavevector(std::size_t axis, std::size_t idx) const {
  return 2.0 * std::numbers::pi * static_cast<double>(wavenumber(axis, idx)) / lengths_[axis];
}

double Grid::max_wavevector() const {
  double s = 0.0;
  for (std::size_t a = 0; a < dim(); ++a) {
    const double k = std::numbers::pi * static_cast<double>(dims_[a]) / lengths_[a];
    s += k * k;
  }
  return std::sqrt(s);
}

std::size_t Grid::flat(std::array<std::size_t, 3> idx) const {
  std::size_t f = 0;
  for (std::size_t a = 0; a < dim(); ++a) f = f * dims_[a] + idx[a];
  return f;
}

std::array<std::size_t, 3> Grid::unflat(std::size_t flat) const {
  std::array<std::size_t, 3> idx{0, 0, 0};
  for (std::size_t a = dim(); a-- > 0;) {
    idx[a] = flat % dims_[a];
    flat /= dims_[a];
  }
  return idx;
}

Grid Grid::refined(std::size_t factor) const {
  auto d = dims_;
  for (auto& n : d) n *= factor;
  return Grid(std::move(d), lengths_);
}

PhysicalField::PhysicalField(Grid g) : grid(std::move(g)), values(grid.total(), 0.0) {}

PhysicalField::PhysicalField(Grid g, std::vector<double> v, std::optional<double> t)
    : grid(std::move(g)), values(std::move(v)), time_tag(t) {
  if (values.size() != grid.total()) {
    throw std::invalid_argument("field has " + std::to_string(values.size()) + " values, grid expects " +
                                std::to_string(grid.total()));
  }
}

SpectralField::SpectralField(Grid g) : grid(std::move(g)), coeffs(grid.total(), {0.0, 0.0}) {}

SpectralField::SpectralField(Grid g, std::vector<std::complex<double>> c) : grid(std::move(g)), coeffs(std::move(c)) {
  if (coeffs.size() != grid.total()) {
    throw std::invalid_argument("spectral field has " + std::to_string(coeffs.size()) + " coefficients, grid expects " +
                                std::to_string(grid.total()));
  }
}

}  // namespace sqglab
