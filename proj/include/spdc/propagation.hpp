#pragma once

#include <atomic>
#include <cmath>
#include <iostream>
#include <variant>
#include <vector>

#include "spdc/fft.hpp"
#include "spdc/grid.hpp"

namespace spdc {

inline std::atomic<long>& paraxial_warning_count() {
  static std::atomic<long> count{0};
  return count;
}

namespace detail {

inline void paraxial_guard(const Grid2D& momentum_grid, double wavelength_m) {
  double kmax = momentum_grid.half_window() * std::sqrt(2.0);
  if (wavelength_m * kmax / (2.0 * M_PI) > 0.1) {
    if (paraxial_warning_count()++ == 0)
      std::cerr << "spdc: warning: grid supports non-paraxial angles "
                   "(lambda*kmax/2pi > 0.1)\n";
  }
}

}  // namespace detail

// Free-space transfer function: multiply the momentum amplitude by
// exp(-i z |k|^2 / (2 k0)) under the e^{-i omega t} convention.
// Position-domain inputs are transformed and transformed back.
inline ComplexField propagate_otf(const ComplexField& field, double distance_m) {
  if (field.grid.domain == Domain::position) {
    if (distance_m == 0.0) return field;
    return to_position(propagate_otf(to_momentum(field), distance_m));
  }
  detail::paraxial_guard(field.grid, field.wavelength_m);
  ComplexField out = field;
  if (distance_m == 0.0) return out;
  double k0 = field.wavenumber();
  const Grid2D& g = out.grid;
  for (int iy = 0; iy < g.n; ++iy) {
    double ky = g.coord(iy);
    for (int ix = 0; ix < g.n; ++ix) {
      double kx = g.coord(ix);
      double phase = -distance_m * (kx * kx + ky * ky) / (2.0 * k0);
      out.at(ix, iy) *= std::exp(cplx(0.0, phase));
    }
  }
  return out;
}

// Far-field (Fraunhofer) map: reinterpret a momentum-domain amplitude as the
// position field a distance z downstream, x = z q / k0. With source_curvature
// the Fresnel prefactor exp(+i k0 |x|^2 / (2 z)) is kept (source not at a
// focal plane); a field taken from the front focal plane of a lens omits it.
// Discrete power is preserved.
inline ComplexField far_field_of_spectrum(const ComplexField& spectrum, double distance_m,
                                          bool source_curvature) {
  if (spectrum.grid.domain != Domain::momentum)
    throw Error("domain", "far_field_of_spectrum expects a momentum-domain field");
  if (!(distance_m > 0.0)) throw Error("domain", "far-field distance must be > 0");
  double k0 = spectrum.wavenumber();
  ComplexField out = spectrum;
  out.grid.domain = Domain::position;
  out.grid.pitch = spectrum.grid.pitch * distance_m / k0;
  double amp = k0 / distance_m;
  const Grid2D& g = out.grid;
  for (int iy = 0; iy < g.n; ++iy) {
    double y = g.coord(iy);
    for (int ix = 0; ix < g.n; ++ix) {
      cplx v = amp * out.at(ix, iy);
      if (source_curvature) {
        double x = g.coord(ix);
        v *= std::exp(cplx(0.0, 0.5 * k0 * (x * x + y * y) / distance_m));
      }
      out.at(ix, iy) = v;
    }
  }
  return out;
}

// Exact 2f Fourier stage: field at the front focal plane of a lens mapped to
// its back focal plane, u = f q / k0, no residual quadratic phase.
inline ComplexField fourier_image_stage(const ComplexField& field, double focal_m) {
  if (field.grid.domain != Domain::position)
    throw Error("domain", "fourier_image_stage expects a position-domain field");
  return far_field_of_spectrum(to_momentum(field), focal_m, false);
}

struct ApertureSpec {
  double diameter_m = 102.3e-6;
  Vec2 center{0.0, 0.0};

  void validate(const Grid2D& grid) const {
    if (!(diameter_m > 0.0)) throw Error("domain", "aperture diameter must be > 0");
    double r = 0.5 * diameter_m;
    double hw = grid.half_window();
    if (std::abs(center.x) + r > hw || std::abs(center.y) + r > hw)
      throw Error("domain", "aperture disc extends outside the grid window");
  }
};

// Hard-edge disc transmission at the plane where the field currently lives.
inline ComplexField apply_aperture(const ComplexField& field, const ApertureSpec& ap) {
  if (field.grid.domain != Domain::position)
    throw Error("domain", "apply_aperture expects a position-domain field");
  if (ap.diameter_m < 2.0 * field.grid.pitch)
    throw Error("aperture-resolution", "aperture narrower than 2 pixels");
  ComplexField out = field;
  const Grid2D& g = out.grid;
  double r2 = 0.25 * ap.diameter_m * ap.diameter_m;
  for (int iy = 0; iy < g.n; ++iy) {
    double dy = g.coord(iy) - ap.center.y;
    for (int ix = 0; ix < g.n; ++ix) {
      double dx = g.coord(ix) - ap.center.x;
      if (dx * dx + dy * dy > r2) out.at(ix, iy) = cplx{0.0, 0.0};
    }
  }
  return out;
}

// Thin lens: quadratic phase exp(-i k0 |x|^2 / (2 f)).
inline ComplexField lens_stage(const ComplexField& field, double focal_m) {
  if (field.grid.domain != Domain::position)
    throw Error("domain", "lens_stage expects a position-domain field");
  if (focal_m == 0.0) throw Error("domain", "lens focal length must be nonzero");
  ComplexField out = field;
  double k0 = field.wavenumber();
  const Grid2D& g = out.grid;
  for (int iy = 0; iy < g.n; ++iy) {
    double y = g.coord(iy);
    for (int ix = 0; ix < g.n; ++ix) {
      double x = g.coord(ix);
      double phase = -k0 * (x * x + y * y) / (2.0 * focal_m);
      out.at(ix, iy) *= std::exp(cplx(0.0, phase));
    }
  }
  return out;
}

struct FreeSpace {
  double distance_m = 0.0;
};
struct Lens {
  double focal_m = 0.1;
};
using Element = std::variant<FreeSpace, Lens, ApertureSpec>;

struct OpticalTrain {
  std::vector<Element> elements;

  void validate() const {
    if (elements.empty()) throw Error("domain", "optical train is empty");
    for (const auto& e : elements)
      if (const auto* l = std::get_if<Lens>(&e); l && l->focal_m == 0.0)
        throw Error("domain", "lens focal length must be nonzero");
  }
};

inline ComplexField run_train(const ComplexField& field, const OpticalTrain& train) {
  train.validate();
  ComplexField f = field;
  if (f.grid.domain == Domain::momentum) f = to_position(f);
  for (const auto& e : train.elements) {
    if (const auto* fs = std::get_if<FreeSpace>(&e))
      f = propagate_otf(f, fs->distance_m);
    else if (const auto* lens = std::get_if<Lens>(&e))
      f = lens_stage(f, lens->focal_m);
    else
      f = apply_aperture(f, std::get<ApertureSpec>(e));
  }
  return f;
}

// Paraxial ray-transfer matrix of the train (apertures are transparent to
// chief rays).
struct Abcd {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;
};

inline Abcd abcd_of(const OpticalTrain& train) {
  Abcd m;
  for (const auto& e : train.elements) {
    Abcd s;
    if (const auto* fs = std::get_if<FreeSpace>(&e)) {
      s = {1.0, fs->distance_m, 0.0, 1.0};
    } else if (const auto* lens = std::get_if<Lens>(&e)) {
      s = {1.0, 0.0, -1.0 / lens->focal_m, 1.0};
    } else {
      continue;
    }
    m = {s.a * m.a + s.b * m.c, s.a * m.b + s.b * m.d,
         s.c * m.a + s.d * m.c, s.c * m.b + s.d * m.d};
  }
  return m;
}

}  // namespace spdc
