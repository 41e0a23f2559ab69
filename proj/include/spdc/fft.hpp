#pragma once

#include <fftw3.h>

#include <complex>
#include <map>
#include <memory>
#include <mutex>

#include "spdc/grid.hpp"

namespace spdc {
namespace detail {

inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// One forward/backward plan pair per grid size, with an owned work buffer.
// FFTW planning is not thread safe; execution on distinct plans is.
class FftPlan {
public:
  explicit FftPlan(int n) : n_(n) {
    std::size_t sz = static_cast<std::size_t>(n) * n;
    buf_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * sz));
    std::lock_guard<std::mutex> lock(planner_mutex());
    fwd_ = fftw_plan_dft_2d(n, n, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_2d(n, n, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }

  ~FftPlan() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(buf_);
  }

  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  // Centered transform: quadrant-swapped copy in, execute, swap back out.
  // `scale` multiplies every output sample.
  void execute(const std::vector<cplx>& in, std::vector<cplx>& out, bool forward,
               double scale) {
    const int n = n_;
    const int h = n / 2;
    auto* b = reinterpret_cast<cplx*>(buf_);
    for (int y = 0; y < n; ++y) {
      int ys = (y + h) % n;
      const cplx* src = &in[static_cast<std::size_t>(y) * n];
      cplx* dst = &b[static_cast<std::size_t>(ys) * n];
      for (int x = 0; x < n; ++x) dst[(x + h) % n] = src[x];
    }
    fftw_execute(forward ? fwd_ : bwd_);
    out.resize(in.size());
    for (int y = 0; y < n; ++y) {
      int ys = (y + h) % n;
      const cplx* src = &b[static_cast<std::size_t>(ys) * n];
      cplx* dst = &out[static_cast<std::size_t>(y) * n];
      for (int x = 0; x < n; ++x) dst[x] = scale * src[(x + h) % n];
    }
  }

private:
  int n_;
  fftw_complex* buf_;
  fftw_plan fwd_;
  fftw_plan bwd_;
};

inline FftPlan& plan_for(int n) {
  thread_local std::map<int, std::unique_ptr<FftPlan>> cache;
  auto& p = cache[n];
  if (!p) p = std::make_unique<FftPlan>(n);
  return *p;
}

}  // namespace detail

// Unitary centered Fourier pair with the angular-frequency pitch relation
// k_pitch = 2*pi / (n * x_pitch). Forward kernel e^{-i k.x}. Both directions
// scale the raw transform by pitch_in^2 / (2*pi), which preserves
// sum |v|^2 * pitch^2 exactly.
inline ComplexField to_momentum(const ComplexField& field) {
  if (field.grid.domain != Domain::position)
    throw Error("domain", "to_momentum expects a position-domain field");
  ComplexField out;
  out.grid = {field.grid.n, field.grid.conjugate_pitch(), Domain::momentum};
  out.wavelength_m = field.wavelength_m;
  double scale = field.grid.pitch * field.grid.pitch / (2.0 * M_PI);
  detail::plan_for(field.grid.n).execute(field.values, out.values, true, scale);
  return out;
}

inline ComplexField to_position(const ComplexField& field) {
  if (field.grid.domain != Domain::momentum)
    throw Error("domain", "to_position expects a momentum-domain field");
  ComplexField out;
  out.grid = {field.grid.n, field.grid.conjugate_pitch(), Domain::position};
  out.wavelength_m = field.wavelength_m;
  double scale = field.grid.pitch * field.grid.pitch / (2.0 * M_PI);
  detail::plan_for(field.grid.n).execute(field.values, out.values, false, scale);
  return out;
}

}  // namespace spdc
