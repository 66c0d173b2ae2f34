#include "sqglab/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

namespace sqglab {

namespace {

// fftw_execute_dft on a cached plan is thread safe; plan creation is not.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [dims, p] : plans_) {
      fftw_destroy_plan(p.forward);
      fftw_destroy_plan(p.backward);
    }
  }

  struct Pair {
    fftw_plan forward;
    fftw_plan backward;
  };

  const Pair& get(const std::vector<std::size_t>& dims) {
    std::lock_guard lock(mutex_);
    auto it = plans_.find(dims);
    if (it != plans_.end()) return it->second;
    std::vector<int> n(dims.begin(), dims.end());
    std::size_t total = 1;
    for (auto d : dims) total *= d;
    auto* in = fftw_alloc_complex(total);
    auto* out = fftw_alloc_complex(total);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    Pair p{fftw_plan_dft(static_cast<int>(n.size()), n.data(), in, out, FFTW_FORWARD, flags),
           fftw_plan_dft(static_cast<int>(n.size()), n.data(), in, out, FFTW_BACKWARD, flags)};
    fftw_free(in);
    fftw_free(out);
    if (p.forward == nullptr || p.backward == nullptr) throw std::runtime_error("FFTW plan creation failed");
    return plans_.emplace(dims, p).first->second;
  }

 private:
  std::mutex mutex_;
  std::map<std::vector<std::size_t>, Pair> plans_;
};

PlanCache& plans() {
  static PlanCache cache;
  return cache;
}

fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

SpectralField forward(const PhysicalField& f) {
  std::vector<std::complex<double>> in(f.values.size());
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    if (!std::isfinite(f.values[i])) {
      throw std::invalid_argument("non-finite value " + std::to_string(f.values[i]) + " at index " + std::to_string(i));
    }
    in[i] = f.values[i];
  }
  SpectralField out(f.grid);
  fftw_execute_dft(plans().get(f.grid.dims()).forward, as_fftw(in.data()), as_fftw(out.coeffs.data()));
  const double scale = 1.0 / static_cast<double>(f.grid.total());
  for (auto& c : out.coeffs) c *= scale;
  return out;
}

PhysicalField inverse(const SpectralField& f) {
  std::vector<std::complex<double>> in = f.coeffs;
  std::vector<std::complex<double>> out(in.size());
  fftw_execute_dft(plans().get(f.grid.dims()).backward, as_fftw(in.data()), as_fftw(out.data()));
  PhysicalField r(f.grid);
  for (std::size_t i = 0; i < out.size(); ++i) r.values[i] = out[i].real();
  return r;
}

SpectralField resample(const SpectralField& f, const Grid& target) {
  if (target.dim() != f.grid.dim()) throw std::invalid_argument("resample: dimension mismatch");
  for (std::size_t a = 0; a < target.dim(); ++a) {
    if (target.length(a) != f.grid.length(a)) throw std::invalid_argument("resample: domain lengths differ");
  }
  SpectralField out(target);
  for_each_mode(f.grid, [&](std::size_t flat, const auto&, const auto& m, const auto&) {
    std::array<std::size_t, 3> idx{0, 0, 0};
    for (std::size_t a = 0; a < target.dim(); ++a) {
      const int half = static_cast<int>(std::min(f.grid.size(a), target.size(a)) / 2);
      if (m[a] <= -half || m[a] >= half) return;
      const int n = static_cast<int>(target.size(a));
      idx[a] = static_cast<std::size_t>(m[a] >= 0 ? m[a] : m[a] + n);
    }
    out.coeffs[target.flat(idx)] = f.coeffs[flat];
  });
  return out;
}

PhysicalField refine(const PhysicalField& f, std::size_t factor) {
  if (factor == 1) return f;
  auto r = inverse(resample(forward(f), f.grid.refined(factor)));
  r.time_tag = f.time_tag;
  return r;
}

}  // namespace sqglab
