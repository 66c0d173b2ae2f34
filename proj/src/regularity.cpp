#include "sqglab/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

#include "sqglab/fft.hpp"

namespace sqglab {

namespace {

double wrap_offset(double d, double length) {
  d = std::fmod(d, length);
  if (d < -0.5 * length) d += length;
  if (d >= 0.5 * length) d -= length;
  return d;
}

constexpr double time_slack = 1e-9;

}  // namespace

std::vector<double> FramePath::at(double s) const {
  if (times.empty()) throw std::invalid_argument("empty frame path");
  if (s <= times.front()) return positions.front();
  if (s >= times.back()) return positions.back();
  const auto it = std::upper_bound(times.begin(), times.end(), s);
  const std::size_t j = static_cast<std::size_t>(it - times.begin());
  const double w = (s - times[j - 1]) / (times[j] - times[j - 1]);
  std::vector<double> out(positions[j].size());
  for (std::size_t a = 0; a < out.size(); ++a) out[a] = (1.0 - w) * positions[j - 1][a] + w * positions[j][a];
  return out;
}

double oscillation(const Trajectory& traj, const ParabolicCylinder& cyl, const FramePath* frame) {
  const Grid& g = traj.config.grid;
  const std::size_t dim = g.dim();
  if (cyl.centre.size() != dim) throw std::invalid_argument("cylinder centre must have one entry per axis");
  if (!(cyl.radius > 0.0)) throw std::invalid_argument("cylinder radius must be positive");
  double hmax = 0.0;
  for (std::size_t a = 0; a < dim; ++a) {
    hmax = std::max(hmax, g.spacing(a));
    if (2.0 * cyl.radius >= g.length(a)) throw std::invalid_argument("cylinder does not fit in one period");
  }
  if (cyl.radius < 4.0 * hmax * (1.0 - 1e-12)) {
    throw std::invalid_argument("cylinder radius must span at least 4 grid cells");
  }
  const double depth = cyl.time_depth();
  const double scale = std::max(1.0, std::abs(cyl.t));
  if (cyl.t > traj.t_final() + time_slack * scale || cyl.t - depth < traj.t_begin() - time_slack * scale) {
    throw std::invalid_argument("cylinder leaves the sampled time range");
  }
  const auto base = frame ? frame->at(cyl.t) : std::vector<double>(dim, 0.0);

  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  bool any = false;
  std::vector<std::vector<std::size_t>> inside(dim);
  for (const auto& snap : traj.snapshots) {
    if (snap.time < cyl.t - depth - time_slack * scale || snap.time > cyl.t + time_slack * scale) continue;
    std::vector<double> centre = cyl.centre;
    if (frame) {
      const auto p = frame->at(snap.time);
      for (std::size_t a = 0; a < dim; ++a) centre[a] += p[a] - base[a];
    }
    for (std::size_t a = 0; a < dim; ++a) {
      inside[a].clear();
      for (std::size_t i = 0; i < g.size(a); ++i) {
        const double d = wrap_offset(static_cast<double>(i) * g.spacing(a) - centre[a], g.length(a));
        if (std::abs(d) <= cyl.radius * (1.0 + 1e-12)) inside[a].push_back(i);
      }
    }
    std::array<std::size_t, 3> idx{0, 0, 0};
    const std::size_t n1 = dim > 1 ? inside[1].size() : 1, n2 = dim > 2 ? inside[2].size() : 1;
    for (std::size_t i = 0; i < inside[0].size(); ++i) {
      idx[0] = inside[0][i];
      for (std::size_t j = 0; j < n1; ++j) {
        if (dim > 1) idx[1] = inside[1][j];
        for (std::size_t l = 0; l < n2; ++l) {
          if (dim > 2) idx[2] = inside[2][l];
          const double v = snap.theta.values[g.flat(idx)];
          lo = std::min(lo, v);
          hi = std::max(hi, v);
          any = true;
        }
      }
    }
  }
  if (!any) throw std::invalid_argument("no snapshot falls inside the cylinder");
  return hi - lo;
}

std::vector<double> box_average(const VectorField& v, const std::vector<double>& x, double radius) {
  std::vector<double> out(v.size(), 0.0);
  if (v.empty()) return out;
  const Grid& g = v.front().grid;
  if (x.size() != g.dim()) throw std::invalid_argument("point must have one entry per axis");
  for (std::size_t c = 0; c < v.size(); ++c) {
    const auto hat = forward(v[c]);
    double sum = 0.0;
    for_each_mode(g, [&](std::size_t f, const std::array<double, 3>& k, const std::array<int, 3>&,
                         const std::array<std::size_t, 3>& idx) {
      double weight = 1.0;
      double phase = 0.0;
      for (std::size_t a = 0; a < g.dim(); ++a) {
        // The Nyquist mode has no well-defined real continuation; drop it.
        if (g.is_nyquist(a, idx[a])) weight = 0.0;
        const double kr = k[a] * radius;
        weight *= kr == 0.0 ? 1.0 : std::sin(kr) / kr;
        phase += k[a] * x[a];
      }
      sum += weight * std::real(hat.coeffs[f] * std::complex<double>(std::cos(phase), std::sin(phase)));
    });
    out[c] = sum;
  }
  return out;
}

namespace {

double default_radius(const Grid& g, double radius) {
  if (radius > 0.0) return radius;
  double l = g.length(0);
  for (std::size_t a = 1; a < g.dim(); ++a) l = std::min(l, g.length(a));
  return 0.25 * l;
}

std::vector<double> blend(const VectorField& a, const VectorField& b, double w, const std::vector<double>& x,
                          double radius) {
  const auto va = box_average(a, x, radius);
  const auto vb = box_average(b, x, radius);
  std::vector<double> out(va.size());
  for (std::size_t c = 0; c < out.size(); ++c) out[c] = (1.0 - w) * va[c] + w * vb[c];
  return out;
}

}  // namespace

FramePath moving_frame(const Trajectory& traj, double radius) {
  const Grid& g = traj.config.grid;
  const double r = default_radius(g, radius);
  FramePath path;
  std::vector<double> x(g.dim(), 0.0);
  path.times.push_back(traj.snapshots.front().time);
  path.positions.push_back(x);
  VectorField v_prev = traj.velocity_at(0);
  for (std::size_t i = 1; i < traj.snapshots.size(); ++i) {
    const VectorField v_next = traj.velocity_at(i);
    const double h = traj.snapshots[i].time - traj.snapshots[i - 1].time;
    const auto k1 = blend(v_prev, v_next, 0.0, x, r);
    std::vector<double> pred(x.size());
    for (std::size_t a = 0; a < x.size(); ++a) pred[a] = x[a] + h * k1[a];
    const auto k2 = blend(v_prev, v_next, 1.0, pred, r);
    for (std::size_t a = 0; a < x.size(); ++a) x[a] += 0.5 * h * (k1[a] + k2[a]);
    path.times.push_back(traj.snapshots[i].time);
    path.positions.push_back(x);
    v_prev = v_next;
  }
  return path;
}

double frame_residual(const Trajectory& traj, const FramePath& frame, double radius) {
  const double r = default_radius(traj.config.grid, radius);
  if (frame.times.size() != traj.snapshots.size()) throw std::invalid_argument("frame does not match trajectory");
  double worst = 0.0;
  VectorField v_prev = traj.velocity_at(0);
  for (std::size_t i = 1; i < frame.times.size(); ++i) {
    const VectorField v_next = traj.velocity_at(i);
    const double h = frame.times[i] - frame.times[i - 1];
    const auto a = box_average(v_prev, frame.positions[i - 1], r);
    const auto b = box_average(v_next, frame.positions[i], r);
    for (std::size_t c = 0; c < a.size(); ++c) {
      const double slope = (frame.positions[i][c] - frame.positions[i - 1][c]) / h;
      worst = std::max(worst, std::abs(slope - 0.5 * (a[c] + b[c])));
    }
    v_prev = v_next;
  }
  return worst;
}

std::vector<PhysicalField> renormalization_sequence(const PhysicalField& theta, std::size_t levels) {
  for (double v : theta.values) {
    if (!(v <= 2.0)) throw std::invalid_argument("renormalisation needs theta <= 2 everywhere");
  }
  std::vector<PhysicalField> out;
  PhysicalField cur = theta;
  for (std::size_t k = 1; k <= levels; ++k) {
    for (double& v : cur.values) v = 2.0 * (v - 1.0);
    out.push_back(cur);
  }
  return out;
}

PhysicalField renormalization_closed_form(const PhysicalField& theta, std::size_t k) {
  PhysicalField out = theta;
  for (double& v : out.values) v = std::ldexp(v - 2.0, static_cast<int>(k)) + 2.0;
  return out;
}

std::vector<double> radius_ladder(double radius_max, std::size_t count) {
  std::vector<double> r;
  for (std::size_t i = 0; i < count; ++i) r.push_back(std::ldexp(radius_max, -static_cast<int>(i)));
  return r;
}

HolderFit holder_exponent_fit(const Trajectory& traj, double t, const std::vector<double>& x,
                              const std::vector<double>& radii, const FramePath* frame) {
  if (radii.size() < 5) throw std::invalid_argument("need at least five radii");
  const auto [rmin, rmax] = std::minmax_element(radii.begin(), radii.end());
  if (*rmax < 10.0 * *rmin) throw std::invalid_argument("radii must span at least a decade");
  HolderFit fit{};
  fit.radii = radii;
  for (double r : radii) fit.oscillations.push_back(oscillation(traj, ParabolicCylinder{t, x, r, std::nullopt}, frame));
  if (std::any_of(fit.oscillations.begin(), fit.oscillations.end(), [](double o) { return o <= 0.0; })) {
    fit.flat = true;
    fit.alpha = std::numeric_limits<double>::infinity();
    fit.raw_slope = fit.alpha;
    fit.r_squared = 1.0;
    return fit;
  }
  const double n = static_cast<double>(radii.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double lx = std::log(radii[i]), ly = std::log(fit.oscillations[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    syy += ly * ly;
  }
  const double cxx = sxx - sx * sx / n, cxy = sxy - sx * sy / n, cyy = syy - sy * sy / n;
  fit.raw_slope = cxy / cxx;
  fit.r_squared = cyy > 0.0 ? (cxy * cxy) / (cxx * cyy) : 1.0;
  fit.alpha = std::clamp(fit.raw_slope, 0.0, 1.5);
  fit.clipped = fit.alpha != fit.raw_slope;
  return fit;
}

}  // namespace sqglab
