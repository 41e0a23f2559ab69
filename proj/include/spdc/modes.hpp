#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "spdc/fft.hpp"
#include "spdc/grid.hpp"

namespace spdc {

// One Laguerre-Gaussian term of a coaxial pump superposition.
struct LgTerm {
  int p = 0;
  int l = 0;
  cplx coeff{1.0, 0.0};
};

struct PumpSpec {
  std::vector<LgTerm> terms;
  double waist_m = 1e-3;

  void validate() const {
    if (terms.empty()) throw Error("degenerate-spec", "pump has no LG terms");
    if (!(waist_m > 0.0)) throw Error("domain", "pump waist must be > 0");
    bool any = false;
    for (const auto& t : terms) {
      if (t.p < 0) throw Error("domain", "LG radial index p must be >= 0");
      if (std::abs(t.coeff) > 0.0) any = true;
    }
    if (!any) throw Error("degenerate-spec", "all pump coefficients are zero");
  }
};

namespace detail {

// Associated Laguerre polynomial L_p^a(x) by the standard three-term recurrence.
inline double assoc_laguerre(int p, int a, double x) {
  if (p == 0) return 1.0;
  double lm1 = 1.0;
  double l0 = 1.0 + a - x;
  for (int k = 1; k < p; ++k) {
    double l1 = ((2.0 * k + 1.0 + a - x) * l0 - (k + a) * lm1) / (k + 1.0);
    lm1 = l0;
    l0 = l1;
  }
  return l0;
}

inline double lg_norm(int p, int l, double w) {
  // sqrt(2 p! / (pi (p+|l|)!)) / w
  double logratio = std::lgamma(p + 1.0) - std::lgamma(p + std::abs(l) + 1.0);
  return std::sqrt(2.0 / M_PI * std::exp(logratio)) / w;
}

// LG_p^l amplitude at radius rho, azimuth phi, waist w; unit L2 norm on the
// continuum, phase winding e^{-i l phi}.
inline cplx lg_amplitude(int p, int l, double w, double rho, double phi) {
  int al = std::abs(l);
  double u = std::sqrt(2.0) * rho / w;
  double x = 2.0 * rho * rho / (w * w);
  double radial = lg_norm(p, l, w) * std::pow(u, al) * std::exp(-rho * rho / (w * w)) *
                  assoc_laguerre(p, al, x);
  return radial * std::exp(cplx(0.0, -l * phi));
}

}  // namespace detail

inline ComplexField lg_mode(int p, int l, double waist_m, const Grid2D& grid,
                            double wavelength_m = 405e-9) {
  grid.validate();
  if (grid.domain != Domain::position)
    throw Error("domain", "lg_mode expects a position-domain grid");
  if (p < 0) throw Error("domain", "LG radial index p must be >= 0");
  if (!(waist_m > 0.0)) throw Error("domain", "waist must be > 0");
  if (waist_m < 4.0 * grid.pitch)
    throw Error("grid-resolution", "waist under-resolved (needs >= 4 pixels)");
  if (waist_m > grid.n * grid.pitch / 4.0)
    throw Error("grid-resolution", "waist too large for the grid window");

  ComplexField f = make_field(grid, wavelength_m);
  for (int iy = 0; iy < grid.n; ++iy) {
    double y = grid.coord(iy);
    for (int ix = 0; ix < grid.n; ++ix) {
      double x = grid.coord(ix);
      double rho = std::hypot(x, y);
      double phi = std::atan2(y, x);
      f.at(ix, iy) = detail::lg_amplitude(p, l, waist_m, rho, phi);
    }
  }
  return f;
}

// Sum of LG terms, renormalized to unit discrete power.
inline ComplexField superpose(const PumpSpec& spec, const Grid2D& grid,
                              double wavelength_m = 405e-9) {
  spec.validate();
  if (grid.domain != Domain::position)
    throw Error("domain", "superpose expects a position-domain grid");
  ComplexField f = make_field(grid, wavelength_m);
  for (const auto& t : spec.terms) {
    if (std::abs(t.coeff) == 0.0) continue;
    ComplexField m = lg_mode(t.p, t.l, spec.waist_m, grid, wavelength_m);
    for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] += t.coeff * m.values[i];
  }
  double pw = f.power();
  if (!(pw > 0.0)) throw Error("degenerate-spec", "pump superposition has zero power");
  double s = 1.0 / std::sqrt(pw);
  for (auto& v : f.values) v *= s;
  return f;
}

// Analytic momentum-space pump amplitude. LG modes are Fourier eigenmodes:
// under the to_momentum convention used here,
//   FT[LG_p^l(w)](q) = (-i)^(|l|+2p) * LG_p^l(q; waist 2/w).
using PumpMomentumFn = std::function<cplx(double qx, double qy)>;

inline cplx lg_momentum_amplitude(int p, int l, double waist_m, double qx, double qy) {
  double q = std::hypot(qx, qy);
  double phi = std::atan2(qy, qx);
  cplx gamma = std::pow(cplx(0.0, -1.0), std::abs(l) + 2 * p);
  return gamma * detail::lg_amplitude(p, l, 2.0 / waist_m, q, phi);
}

// Momentum spread beyond which all terms are numerically zero; used to
// restrict evaluation to a small bounding box.
inline double pump_momentum_cutoff(const PumpSpec& spec) {
  double r = 0.0;
  for (const auto& t : spec.terms) {
    double scale = std::sqrt(2.0 * t.p + std::abs(t.l) + 1.0);
    r = std::max(r, (2.0 / spec.waist_m) * (2.0 * scale + 7.0));
  }
  return r;
}

inline PumpMomentumFn pump_spectrum(const PumpSpec& spec) {
  spec.validate();
  // Coefficient normalization: LG terms are orthonormal on the continuum, so
  // unit total power means |c|^2 sums to one.
  double c2 = 0.0;
  for (const auto& t : spec.terms) c2 += std::norm(t.coeff);
  double s = 1.0 / std::sqrt(c2);
  std::vector<LgTerm> terms = spec.terms;
  double w = spec.waist_m;
  return [terms, w, s](double qx, double qy) {
    cplx v{0.0, 0.0};
    for (const auto& t : terms)
      v += t.coeff * lg_momentum_amplitude(t.p, t.l, w, qx, qy);
    return s * v;
  };
}

}  // namespace spdc
