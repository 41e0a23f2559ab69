#pragma once

#include <cmath>

#include "spdc/grid.hpp"

namespace spdc {

enum class Polarization { ordinary, extraordinary };

// Sellmeier-form dispersion n^2(lambda) = A + B/(lambda^2 - C) - D*lambda^2,
// lambda in micrometers. Defaults are the standard BBO coefficient set.
struct IndexModel {
  double ord_a = 2.7405, ord_b = 0.0184, ord_c = 0.0179, ord_d = 0.0155;
  double ext_a = 2.3730, ext_b = 0.0128, ext_c = 0.0156, ext_d = 0.0044;
  double lambda_min_um = 0.3, lambda_max_um = 1.1;

  double n_ordinary(double wavelength_m) const {
    return eval(ord_a, ord_b, ord_c, ord_d, wavelength_m);
  }
  double n_extraordinary(double wavelength_m) const {
    return eval(ext_a, ext_b, ext_c, ext_d, wavelength_m);
  }

private:
  double eval(double a, double b, double c, double d, double wavelength_m) const {
    double um = wavelength_m * 1e6;
    if (um < lambda_min_um || um > lambda_max_um)
      throw Error("dispersion-range", "wavelength outside Sellmeier validity range");
    double l2 = um * um;
    return std::sqrt(a + b / (l2 - c) - d * l2);
  }
};

inline double refractive_index(const IndexModel& model, double wavelength_m,
                               Polarization pol, double propagation_angle_rad = 0.0) {
  double no = model.n_ordinary(wavelength_m);
  if (pol == Polarization::ordinary) return no;
  double ne = model.n_extraordinary(wavelength_m);
  double c = std::cos(propagation_angle_rad), s = std::sin(propagation_angle_rad);
  return 1.0 / std::sqrt(c * c / (no * no) + s * s / (ne * ne));
}

// Noncollinear degenerate Type-I geometry: extraordinary pump at the fixed
// cut angle, ordinary signal and idler.
struct CrystalParams {
  double length_m = 5e-3;
  double cut_angle_rad = 29.97 * M_PI / 180.0;
  double pump_wavelength_m = 405e-9;
  double signal_wavelength_m = 810e-9;
  double idler_wavelength_m = 810e-9;
  IndexModel index_model{};

  void validate() const {
    if (!(length_m > 0.0)) throw Error("domain", "crystal length must be > 0");
    double lhs = 1.0 / pump_wavelength_m;
    double rhs = 1.0 / signal_wavelength_m + 1.0 / idler_wavelength_m;
    if (std::abs(lhs - rhs) > 1e-9 * lhs)
      throw Error("domain", "wavelengths violate energy conservation");
  }

  double pump_wavenumber() const {
    double n = refractive_index(index_model, pump_wavelength_m,
                                Polarization::extraordinary, cut_angle_rad);
    return 2.0 * M_PI * n / pump_wavelength_m;
  }
  double signal_wavenumber() const {
    return 2.0 * M_PI * index_model.n_ordinary(signal_wavelength_m) / signal_wavelength_m;
  }
  double idler_wavenumber() const {
    return 2.0 * M_PI * index_model.n_ordinary(idler_wavelength_m) / idler_wavelength_m;
  }
};

// Longitudinal phase mismatch for transverse momenta q_s, q_i; pump transverse
// momentum is q_s + q_i by construction.
inline double delta_k(Vec2 q_s, Vec2 q_i, const CrystalParams& crystal) {
  double kp = crystal.pump_wavenumber();
  double ks = crystal.signal_wavenumber();
  double ki = crystal.idler_wavenumber();
  Vec2 qp = q_s + q_i;
  double qs2 = norm2(q_s), qi2 = norm2(q_i), qp2 = norm2(qp);
  if (qs2 >= ks * ks || qi2 >= ki * ki || qp2 >= kp * kp)
    throw Error("evanescent", "transverse momentum beyond the evanescent cutoff");
  return std::sqrt(kp * kp - qp2) - std::sqrt(ks * ks - qs2) - std::sqrt(ki * ki - qi2);
}

inline double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

// sinc(dk L / 2) * exp(i dk L / 2).
inline cplx phase_matching_weight(Vec2 q_s, Vec2 q_i, const CrystalParams& crystal,
                                  bool include_mismatch_phase = true) {
  double arg = 0.5 * delta_k(q_s, q_i, crystal) * crystal.length_m;
  double env = sinc(arg);
  if (!include_mismatch_phase) return cplx(env, 0.0);
  return env * std::exp(cplx(0.0, arg));
}

namespace detail {

// Mismatch for a symmetric pair (q, -q) at radial momentum q.
inline double symmetric_delta_k(double q, const CrystalParams& c) {
  return delta_k({q, 0.0}, {-q, 0.0}, c);
}

template <class F>
double bisect(F f, double lo, double hi, int iters = 200) {
  double flo = f(lo);
  for (int i = 0; i < iters; ++i) {
    double mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

// Cut angle at which collinear degenerate emission is exactly phase matched.
inline double collinear_cut_angle(const CrystalParams& crystal) {
  auto f = [&crystal](double theta) {
    CrystalParams c = crystal;
    c.cut_angle_rad = theta;
    return detail::symmetric_delta_k(0.0, c);
  };
  double lo = 5.0 * M_PI / 180.0, hi = 80.0 * M_PI / 180.0;
  if (f(lo) * f(hi) > 0.0) throw Error("domain", "no collinear phase-matching angle");
  return detail::bisect(f, lo, hi);
}

// Radius of the degenerate SPDC ring: the symmetric-pair momentum where the
// mismatch vanishes. Zero when emission is collinear at this cut.
inline double ring_radius(const CrystalParams& crystal) {
  double ks = crystal.signal_wavenumber();
  if (detail::symmetric_delta_k(0.0, crystal) >= 0.0) return 0.0;
  return detail::bisect([&crystal](double q) { return detail::symmetric_delta_k(q, crystal); },
                        0.0, 0.9 * ks);
}

struct Annulus {
  double r_lo = 0.0;
  double r_hi = 0.0;
};

// Radial interval around the ring where sinc^2(dk L / 2) stays above
// `threshold` (main lobe only).
inline Annulus phase_matched_annulus(const CrystalParams& crystal, double threshold = 0.05) {
  double ring = ring_radius(crystal);
  if (ring <= 0.0) throw Error("domain", "collinear geometry has no annulus");
  // sinc^2(x0) = threshold on the main lobe.
  double x0 = detail::bisect(
      [threshold](double x) { return sinc(x) * sinc(x) - threshold; }, 1e-9, M_PI - 1e-9);
  double target = 2.0 * x0 / crystal.length_m;
  double ks = crystal.signal_wavenumber();
  auto dk = [&crystal](double q) { return detail::symmetric_delta_k(q, crystal); };
  Annulus a;
  a.r_lo = detail::bisect([&](double q) { return dk(q) + target; }, 0.0, ring);
  a.r_hi = detail::bisect([&](double q) { return dk(q) - target; }, ring, 0.95 * ks);
  return a;
}

}  // namespace spdc
