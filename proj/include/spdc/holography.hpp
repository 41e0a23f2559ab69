#pragma once

#include <cmath>

#include "spdc/biphoton.hpp"
#include "spdc/fft.hpp"
#include "spdc/grid.hpp"

namespace spdc {

// Blazed fork hologram: pure phase transmission exp(i(l*phi + 2*pi*x/period)).
struct ForkHologram {
  int l = 0;
  double period_m = 0.0;
  Grid2D grid;

  cplx transmission(double x, double y) const {
    double phi = std::atan2(y, x);
    return std::exp(cplx(0.0, l * phi + 2.0 * M_PI * x / period_m));
  }
};

inline ForkHologram fork_hologram(int l, double period_m, const Grid2D& grid) {
  grid.validate();
  if (grid.domain != Domain::position)
    throw Error("domain", "fork_hologram expects a position-domain grid");
  if (!(period_m >= 4.0 * grid.pitch))
    throw Error("grating-resolution", "grating period under-resolved (needs >= 4 pixels)");
  return ForkHologram{l, period_m, grid};
}

namespace detail {

// |far field|^2 of one component behind the hologram, windowed around the
// first-order carrier and re-centered so the carrier sits at the array
// center. Output lives on the momentum grid of the hologram plane.
inline void accumulate_first_order(IntensityMap& acc, const ComplexField& at_hologram,
                                   const ForkHologram& holo, double weight) {
  ComplexField u = at_hologram;
  const Grid2D& g = u.grid;
  for (int iy = 0; iy < g.n; ++iy) {
    double y = g.coord(iy);
    for (int ix = 0; ix < g.n; ++ix)
      u.at(ix, iy) *= holo.transmission(g.coord(ix), y);
  }
  ComplexField far = to_momentum(u);
  double carrier = 2.0 * M_PI / holo.period_m;
  int shift = static_cast<int>(std::lround(carrier / far.grid.pitch));
  double radius = 0.5 * carrier;
  double r2 = radius * radius;
  for (int iy = 0; iy < g.n; ++iy) {
    double ky = far.grid.coord(iy);
    for (int ix = 0; ix < g.n; ++ix) {
      int jx = ix + shift;  // sample around the carrier
      if (jx >= g.n) continue;
      double kx = far.grid.coord(jx) - carrier;
      if (kx * kx + ky * ky > r2) continue;
      acc.at(ix, iy) += weight * std::norm(far.at(jx, iy));
    }
  }
}

inline void check_order_separation(const ComplexField& at_hologram, const ForkHologram& holo) {
  // The diffraction orders are separated by the carrier frequency; require
  // the component spectrum to be much narrower than that, and the first
  // order to fit inside the grid.
  ComplexField far = to_momentum(at_hologram);
  double carrier = 2.0 * M_PI / holo.period_m;
  if (carrier + 0.5 * carrier > far.grid.half_window())
    throw Error("order-overlap", "first diffraction order falls outside the grid");
  double p = 0.0, r2m = 0.0;
  for (int iy = 0; iy < far.grid.n; ++iy) {
    double ky = far.grid.coord(iy);
    for (int ix = 0; ix < far.grid.n; ++ix) {
      double kx = far.grid.coord(ix);
      double v = std::norm(far.at(ix, iy));
      p += v;
      r2m += v * (kx * kx + ky * ky);
    }
  }
  double rms = p > 0.0 ? std::sqrt(r2m / p) : 0.0;
  if (4.0 * rms > carrier)
    throw Error("order-overlap", "grating period too small relative to the beam spectrum");
}

}  // namespace detail

// First-order far-field readout of the incoherent marginal projected on a
// fork hologram. The hologram plane is the train's output plane; the far
// field is one lens-Fourier stage (readout scale x = f * k / k0).
inline IntensityMap diffract_first_order(const BiphotonAmplitude& bi, const OpticalTrain& train,
                                         const ForkHologram& holo) {
  bool checked = false;
  IntensityMap acc = map_components(
      bi, train,
      [&] {
        Grid2D mg{holo.grid.n, holo.grid.conjugate_pitch(), Domain::momentum};
        return make_intensity(mg);
      },
      [&](IntensityMap& a, std::size_t i, double w, const ComplexField&,
          const ComplexField& out) {
        if (i == 0 && !checked) {
          detail::check_order_separation(out, holo);
          checked = true;
        }
        detail::accumulate_first_order(a, out, holo, w);
      },
      [](IntensityMap& tot, IntensityMap&& part) {
        for (std::size_t j = 0; j < tot.values.size(); ++j) tot.values[j] += part.values[j];
      });
  return acc;  // raw weights, comparable across runs of the same pipeline
}

// Same readout with the hologram at the chain's camera plane.
inline IntensityMap diffract_first_order(const BiphotonAmplitude& bi, const ImagingChain& chain,
                                         const ForkHologram& holo) {
  bool checked = false;
  IntensityMap acc = map_components(
      bi, chain,
      [&] {
        Grid2D mg{holo.grid.n, holo.grid.conjugate_pitch(), Domain::momentum};
        return make_intensity(mg);
      },
      [&](IntensityMap& a, std::size_t i, double w, const ChainStage& st) {
        if (i == 0 && !checked) {
          detail::check_order_separation(st.camera, holo);
          checked = true;
        }
        detail::accumulate_first_order(a, st.camera, holo, w);
      },
      [](IntensityMap& tot, IntensityMap&& part) {
        for (std::size_t j = 0; j < tot.values.size(); ++j) tot.values[j] += part.values[j];
      });
  return acc;
}

// Coherent control: a single field at the hologram plane.
inline IntensityMap diffract_first_order(const ComplexField& at_hologram,
                                         const ForkHologram& holo) {
  detail::check_order_separation(at_hologram, holo);
  Grid2D mg{holo.grid.n, holo.grid.conjugate_pitch(), Domain::momentum};
  IntensityMap acc = make_intensity(mg);
  detail::accumulate_first_order(acc, at_hologram, holo, 1.0);
  return acc;
}

}  // namespace spdc
