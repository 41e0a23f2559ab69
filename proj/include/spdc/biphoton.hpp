#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "spdc/crystal.hpp"
#include "spdc/modes.hpp"
#include "spdc/parallel.hpp"
#include "spdc/propagation.hpp"

namespace spdc {

// Quadrature sampling of idler transverse momentum over (a sector of) the
// phase-matched annulus. Uniform in radius and azimuth, weights r*dr*dphi.
struct IdlerSampling {
  int n_radial = 32;
  int n_azimuthal = 32;
  double r_lo = 0.0;
  double r_hi = 0.0;
  double phi_center = 0.0;
  double phi_half_width = M_PI;  // pi = full ring

  void validate() const {
    if (n_radial < 1 || n_azimuthal < 1)
      throw Error("domain", "idler sampling needs at least one sample per axis");
    if (!(r_hi > r_lo) || r_lo < 0.0)
      throw Error("domain", "idler annulus radii must satisfy 0 <= r_lo < r_hi");
    if (!(phi_half_width > 0.0)) throw Error("domain", "idler sector width must be > 0");
  }
};

struct IdlerSample {
  Vec2 q;
  double weight;
};

inline std::vector<IdlerSample> idler_samples(const IdlerSampling& s) {
  s.validate();
  std::vector<IdlerSample> out;
  out.reserve(static_cast<std::size_t>(s.n_radial) * s.n_azimuthal);
  double dr = (s.r_hi - s.r_lo) / s.n_radial;
  double dphi = 2.0 * s.phi_half_width / s.n_azimuthal;
  for (int j = 0; j < s.n_radial; ++j) {
    double r = s.r_lo + (j + 0.5) * dr;
    for (int m = 0; m < s.n_azimuthal; ++m) {
      double phi = s.phi_center - s.phi_half_width + (m + 0.5) * dphi;
      out.push_back({{r * std::cos(phi), r * std::sin(phi)}, r * dr * dphi});
    }
  }
  return out;
}

// Annulus sampling matched to the crystal; when a signal frame is given the
// sector is clipped to the idler azimuths whose partner momenta land inside
// the signal window (everything else evaluates to zero anyway).
inline IdlerSampling annulus_sampling(const CrystalParams& crystal, int n_radial = 32,
                                      int n_azimuthal = 32, double threshold = 0.05) {
  Annulus a = phase_matched_annulus(crystal, threshold);
  IdlerSampling s;
  s.n_radial = n_radial;
  s.n_azimuthal = n_azimuthal;
  s.r_lo = a.r_lo;
  s.r_hi = a.r_hi;
  return s;
}

// When acceptance_q > 0 the sector is additionally clipped to the azimuths
// whose partner signal momenta reach the downstream acceptance (e.g. the iris
// plus the pump spread); everything outside is blocked anyway.
inline IdlerSampling sector_sampling(const CrystalParams& crystal, const Grid2D& signal_grid,
                                     Vec2 frame, int n_radial = 32, int n_azimuthal = 32,
                                     double threshold = 0.05, double acceptance_q = 0.0) {
  IdlerSampling s = annulus_sampling(crystal, n_radial, n_azimuthal, threshold);
  double ring = norm(frame);
  if (ring > 0.0) {
    Grid2D mg = signal_grid.domain == Domain::momentum
                    ? signal_grid
                    : Grid2D{signal_grid.n, signal_grid.conjugate_pitch(), Domain::momentum};
    double reach = 0.9 * mg.half_window();
    if (acceptance_q > 0.0) reach = std::min(reach, acceptance_q);
    s.phi_center = std::atan2(-frame.y, -frame.x);
    s.phi_half_width = std::min(M_PI, std::asin(std::min(1.0, reach / ring)));
  }
  return s;
}

struct BiphotonOptions {
  Vec2 frame{0.0, 0.0};          // signal momentum-grid center in lab coordinates
  bool include_mismatch_phase = true;
  bool strict = false;
};

// Sampled biphoton mode function: one signal-plane complex field per idler
// momentum sample. Fields are generated on demand; at construction each value
// equals E0(q_s + q_i) * phase_matching_weight(q_s, q_i), with q_s measured
// from the frame offset.
struct BiphotonAmplitude {
  PumpMomentumFn pump;
  double pump_cutoff = 0.0;  // momentum radius of pump support
  CrystalParams crystal;
  Grid2D signal_grid;  // momentum domain
  BiphotonOptions options;
  std::vector<IdlerSample> samples;

  ComplexField signal_field(std::size_t i) const {
    const IdlerSample& s = samples[i];
    ComplexField f = make_field(signal_grid, crystal.signal_wavelength_m);
    const Grid2D& g = signal_grid;
    // Pump support center in grid coordinates.
    Vec2 c = {-options.frame.x - s.q.x, -options.frame.y - s.q.y};
    int ix0 = 0, ix1 = g.n, iy0 = 0, iy1 = g.n;
    if (pump_cutoff > 0.0) {
      ix0 = std::max(0, static_cast<int>(std::floor((c.x - pump_cutoff) / g.pitch)) + g.n / 2);
      ix1 = std::min(g.n, static_cast<int>(std::ceil((c.x + pump_cutoff) / g.pitch)) + g.n / 2 + 1);
      iy0 = std::max(0, static_cast<int>(std::floor((c.y - pump_cutoff) / g.pitch)) + g.n / 2);
      iy1 = std::min(g.n, static_cast<int>(std::ceil((c.y + pump_cutoff) / g.pitch)) + g.n / 2 + 1);
    }
    double ks = crystal.signal_wavenumber();
    double ki = crystal.idler_wavenumber();
    double kp = crystal.pump_wavenumber();
    if (norm2(s.q) >= ki * ki) return f;  // evanescent idler sample
    for (int iy = iy0; iy < iy1; ++iy) {
      double qy = options.frame.y + g.coord(iy);
      for (int ix = ix0; ix < ix1; ++ix) {
        double qx = options.frame.x + g.coord(ix);
        Vec2 qs{qx, qy};
        Vec2 qp = qs + s.q;
        if (norm2(qs) >= ks * ks || norm2(qp) >= kp * kp) continue;  // evanescent -> 0
        cplx e0 = pump(qp.x, qp.y);
        if (e0 == cplx{0.0, 0.0}) continue;
        f.at(ix, iy) =
            e0 * phase_matching_weight(qs, s.q, crystal, options.include_mismatch_phase);
      }
    }
    return f;
  }
};

inline BiphotonAmplitude build_biphoton(const PumpSpec& pump, const CrystalParams& crystal,
                                        const Grid2D& signal_grid,
                                        const IdlerSampling& sampling,
                                        const BiphotonOptions& options = {}) {
  pump.validate();
  crystal.validate();
  BiphotonAmplitude bi;
  bi.pump = pump_spectrum(pump);
  bi.pump_cutoff = pump_momentum_cutoff(pump);
  bi.crystal = crystal;
  bi.signal_grid = signal_grid.domain == Domain::momentum
                       ? signal_grid
                       : Grid2D{signal_grid.n, signal_grid.conjugate_pitch(), Domain::momentum};
  bi.signal_grid.validate();
  bi.options = options;
  bi.samples = idler_samples(sampling);

  if (options.strict) {
    // At least one idler sample must put its partner momentum inside the
    // signal window, or the whole quadrature is identically zero.
    double reach = bi.signal_grid.half_window() + bi.pump_cutoff;
    bool hit = false;
    for (const auto& s : bi.samples) {
      Vec2 c = {-options.frame.x - s.q.x, -options.frame.y - s.q.y};
      if (std::abs(c.x) < reach && std::abs(c.y) < reach) {
        hit = true;
        break;
      }
    }
    if (!hit) throw Error("sampling-miss", "idler sampling misses the signal window");
  }
  return bi;
}

// Weighted incoherent sum of |signal field|^2 over idler samples (peak-1).
inline IntensityMap angular_spectrum(const BiphotonAmplitude& bi) {
  auto acc = chunked_reduce(
      bi.samples.size(), 16,
      [&] { return make_intensity(bi.signal_grid); },
      [&](IntensityMap& m, std::size_t i) {
        ComplexField f = bi.signal_field(i);
        double w = bi.samples[i].weight;
        for (std::size_t j = 0; j < f.values.size(); ++j)
          m.values[j] += w * std::norm(f.values[j]);
      },
      [](IntensityMap& tot, IntensityMap&& part) {
        for (std::size_t j = 0; j < tot.values.size(); ++j)
          tot.values[j] += part.values[j];
      });
  acc.normalize(Normalization::peak1);
  return acc;
}

// Streams each idler component through the train; Process is called with the
// propagated coherent field and must accumulate into Acc. Deterministic
// chunked reduction, fixed chunk size.
template <class MakeAcc, class Process, class Combine>
auto map_components(const BiphotonAmplitude& bi, const OpticalTrain& train, MakeAcc make_acc,
                    Process process, Combine combine, std::size_t chunk_size = 16)
    -> decltype(make_acc()) {
  train.validate();
  return chunked_reduce(
      bi.samples.size(), chunk_size, make_acc,
      [&](auto& acc, std::size_t i) {
        ComplexField f = to_position(bi.signal_field(i));
        ComplexField u = run_train(f, train);
        process(acc, i, bi.samples[i].weight, f, u);
      },
      combine);
}

// --- iris + 2f imaging arm --------------------------------------------------
//
// crystal -> z0 -> iris -> f -> lens -> z1 -> camera, with two models of the
// z0 stage:
//   farfield: the signal momentum amplitude is read off directly as the field
//     at the iris, x = z0 q / k0, keeping the diverging-source curvature. The
//     iris sits at the front focal plane, so iris -> camera is an exact
//     Fourier stage plus free propagation over z1 - f in camera space. Grids
//     rescale along the arm; the camera pitch equals (f/z0) times the crystal
//     pitch, so magnified images fill the same window fraction as the source.
//   fresnel: exact scalar propagation through the equivalent OpticalTrain,
//     all planes on the crystal grid.
struct ImagingChain {
  double z0_m = 0.05;
  double focal_m = 0.10;
  double z1_m = 0.10;
  ApertureSpec aperture{};
  bool farfield = true;

  OpticalTrain as_train() const {
    return OpticalTrain{
        {FreeSpace{z0_m}, aperture, FreeSpace{focal_m}, Lens{focal_m}, FreeSpace{z1_m}}};
  }
  void validate() const {
    if (!(z0_m > 0.0) || !(focal_m > 0.0) || !(z1_m >= 0.0))
      throw Error("domain", "imaging chain distances must be positive");
  }
};

namespace detail {
inline Grid2D as_momentum(const Grid2D& g) {
  return g.domain == Domain::momentum ? g : Grid2D{g.n, g.conjugate_pitch(), Domain::momentum};
}
}  // namespace detail

inline Grid2D chain_aperture_grid(const ImagingChain& ch, const Grid2D& signal_grid,
                                  double wavelength_m) {
  Grid2D mg = detail::as_momentum(signal_grid);
  if (!ch.farfield) return {mg.n, mg.conjugate_pitch(), Domain::position};
  double k0 = 2.0 * M_PI / wavelength_m;
  return {mg.n, mg.pitch * ch.z0_m / k0, Domain::position};
}

inline Grid2D chain_camera_grid(const ImagingChain& ch, const Grid2D& signal_grid,
                                double wavelength_m) {
  Grid2D mg = detail::as_momentum(signal_grid);
  if (!ch.farfield) return {mg.n, mg.conjugate_pitch(), Domain::position};
  double k0 = 2.0 * M_PI / wavelength_m;
  double pitch_a = mg.pitch * ch.z0_m / k0;
  return {mg.n, 2.0 * M_PI * ch.focal_m / (mg.n * pitch_a * k0), Domain::position};
}

struct ChainStage {
  ComplexField camera;
  double power_in = 0.0;
  double power_aperture = 0.0;
};

inline ChainStage chain_component(const BiphotonAmplitude& bi, std::size_t i,
                                  const ImagingChain& ch) {
  ComplexField spec = bi.signal_field(i);
  ChainStage st;
  if (!ch.farfield) {
    ComplexField in = to_position(spec);
    st.power_in = in.power();
    st.camera = run_train(in, ch.as_train());
    st.power_aperture = st.camera.power();
    return st;
  }
  ComplexField iris = far_field_of_spectrum(spec, ch.z0_m, true);
  st.power_in = iris.power();
  iris = apply_aperture(iris, ch.aperture);
  st.power_aperture = iris.power();
  st.camera = fourier_image_stage(iris, ch.focal_m);
  if (ch.z1_m != ch.focal_m) st.camera = propagate_otf(st.camera, ch.z1_m - ch.focal_m);
  return st;
}

// Streams each idler component through the chain; Process receives the
// ChainStage for that component.
template <class MakeAcc, class Process, class Combine>
auto map_components(const BiphotonAmplitude& bi, const ImagingChain& chain, MakeAcc make_acc,
                    Process process, Combine combine, std::size_t chunk_size = 16)
    -> decltype(make_acc()) {
  chain.validate();
  return chunked_reduce(
      bi.samples.size(), chunk_size, make_acc,
      [&](auto& acc, std::size_t i) {
        ChainStage st = chain_component(bi, i, chain);
        process(acc, i, bi.samples[i].weight, st);
      },
      combine);
}

// Idler-traced camera image (peak-1). In strict mode the run fails when
// essentially no power survives the iris for any sample.
inline IntensityMap marginal_image(const BiphotonAmplitude& bi, const ImagingChain& chain) {
  struct Acc {
    IntensityMap img;
    double power_in = 0.0;
    double power_ap = 0.0;
  };
  Grid2D cam = chain_camera_grid(chain, bi.signal_grid, bi.crystal.signal_wavelength_m);
  Acc acc = map_components(
      bi, chain,
      [&] { return Acc{make_intensity(cam), 0.0, 0.0}; },
      [](Acc& a, std::size_t, double w, const ChainStage& st) {
        a.power_in += w * st.power_in;
        a.power_ap += w * st.power_aperture;
        for (std::size_t j = 0; j < st.camera.values.size(); ++j)
          a.img.values[j] += w * std::norm(st.camera.values[j]);
      },
      [](Acc& tot, Acc&& part) {
        for (std::size_t j = 0; j < tot.img.values.size(); ++j)
          tot.img.values[j] += part.img.values[j];
        tot.power_in += part.power_in;
        tot.power_ap += part.power_ap;
      });
  if (bi.options.strict && acc.power_ap < 1e-6 * acc.power_in)
    throw Error("sampling-miss", "less than 1e-6 of input power survives the iris");
  acc.img.normalize(Normalization::peak1);
  return acc.img;
}

// Idler-traced signal image after the train (peak-1). In strict mode the run
// fails when essentially no power survives the aperture for any sample.
inline IntensityMap marginal_image(const BiphotonAmplitude& bi, const OpticalTrain& train) {
  struct Acc {
    IntensityMap img;
    double power_in = 0.0;
    double power_out = 0.0;
  };
  Grid2D pos_grid{bi.signal_grid.n, bi.signal_grid.conjugate_pitch(), Domain::position};
  Acc acc = map_components(
      bi, train,
      [&] { return Acc{make_intensity(pos_grid), 0.0, 0.0}; },
      [](Acc& a, std::size_t, double w, const ComplexField& in, const ComplexField& out) {
        a.power_in += w * in.power();
        double p = 0.0;
        for (std::size_t j = 0; j < out.values.size(); ++j) {
          double v = std::norm(out.values[j]);
          a.img.values[j] += w * v;
          p += v;
        }
        a.power_out += w * p * out.grid.pitch * out.grid.pitch;
      },
      [](Acc& tot, Acc&& part) {
        for (std::size_t j = 0; j < tot.img.values.size(); ++j)
          tot.img.values[j] += part.img.values[j];
        tot.power_in += part.power_in;
        tot.power_out += part.power_out;
      });
  if (bi.options.strict && acc.power_out < 1e-6 * acc.power_in)
    throw Error("sampling-miss", "less than 1e-6 of input power survives the train");
  acc.img.normalize(Normalization::peak1);
  return acc.img;
}

// --- azimuthal (OAM) decomposition -----------------------------------------

constexpr int kOamMax = 8;

struct OamSpectrum {
  std::array<double, 2 * kOamMax + 1> power{};  // index l + kOamMax

  double& at(int l) { return power[static_cast<std::size_t>(l + kOamMax)]; }
  double at(int l) const { return power[static_cast<std::size_t>(l + kOamMax)]; }

  double total() const {
    double s = 0.0;
    for (double p : power) s += p;
    return s;
  }
  double mean() const {
    double s = 0.0, t = total();
    for (int l = -kOamMax; l <= kOamMax; ++l) s += l * at(l);
    return t > 0.0 ? s / t : 0.0;
  }
  void normalize() {
    double t = total();
    if (t > 0.0)
      for (double& p : power) p /= t;
  }
};

namespace detail {

inline cplx bilinear(const ComplexField& f, double x, double y) {
  const Grid2D& g = f.grid;
  double fx = x / g.pitch + g.n / 2;
  double fy = y / g.pitch + g.n / 2;
  int ix = static_cast<int>(std::floor(fx));
  int iy = static_cast<int>(std::floor(fy));
  if (ix < 0 || iy < 0 || ix + 1 >= g.n || iy + 1 >= g.n) return {0.0, 0.0};
  double tx = fx - ix, ty = fy - iy;
  return (1 - tx) * (1 - ty) * f.at(ix, iy) + tx * (1 - ty) * f.at(ix + 1, iy) +
         (1 - tx) * ty * f.at(ix, iy + 1) + tx * ty * f.at(ix + 1, iy + 1);
}

// Power per azimuthal harmonic of a coherent field about `center`.
// Convention: a field winding e^{-i l phi} reports its power at +l.
inline OamSpectrum field_oam(const ComplexField& f, Vec2 center) {
  const Grid2D& g = f.grid;
  if (std::abs(center.x) > g.half_window() || std::abs(center.y) > g.half_window())
    throw Error("domain", "decomposition center outside the grid");
  const int nphi = 256;
  const double dr = 2.0 * g.pitch;
  const int nr = g.n / 4;
  OamSpectrum spec;
  std::vector<cplx> ring(nphi);
  for (int j = 0; j < nr; ++j) {
    double r = (j + 0.5) * dr;
    for (int m = 0; m < nphi; ++m) {
      double phi = 2.0 * M_PI * m / nphi;
      ring[m] = bilinear(f, center.x + r * std::cos(phi), center.y + r * std::sin(phi));
    }
    for (int l = -kOamMax; l <= kOamMax; ++l) {
      cplx c{0.0, 0.0};
      for (int m = 0; m < nphi; ++m) {
        double phi = 2.0 * M_PI * m / nphi;
        c += ring[m] * std::exp(cplx(0.0, l * phi));
      }
      c /= static_cast<double>(nphi);
      spec.at(l) += r * dr * std::norm(c);
    }
  }
  return spec;
}

}  // namespace detail

inline OamSpectrum oam_spectrum(const ComplexField& coherent_field, Vec2 center = {0.0, 0.0}) {
  OamSpectrum s = detail::field_oam(coherent_field, center);
  s.normalize();
  return s;
}

// Weight-summed azimuthal power spectrum of the per-idler coherent fields at
// the end of the train (the incoherent marginal's OAM content).
inline OamSpectrum oam_spectrum(const BiphotonAmplitude& bi, const OpticalTrain& train,
                                Vec2 center = {0.0, 0.0}) {
  OamSpectrum acc = map_components(
      bi, train, [] { return OamSpectrum{}; },
      [center](OamSpectrum& a, std::size_t, double w, const ComplexField&,
               const ComplexField& out) {
        OamSpectrum s = detail::field_oam(out, center);
        for (std::size_t k = 0; k < a.power.size(); ++k) a.power[k] += w * s.power[k];
      },
      [](OamSpectrum& tot, OamSpectrum&& part) {
        for (std::size_t k = 0; k < tot.power.size(); ++k) tot.power[k] += part.power[k];
      });
  acc.normalize();
  return acc;
}

inline OamSpectrum oam_spectrum(const BiphotonAmplitude& bi, const ImagingChain& chain,
                                Vec2 center = {0.0, 0.0}) {
  OamSpectrum acc = map_components(
      bi, chain, [] { return OamSpectrum{}; },
      [center](OamSpectrum& a, std::size_t, double w, const ChainStage& st) {
        OamSpectrum s = detail::field_oam(st.camera, center);
        for (std::size_t k = 0; k < a.power.size(); ++k) a.power[k] += w * s.power[k];
      },
      [](OamSpectrum& tot, OamSpectrum&& part) {
        for (std::size_t k = 0; k < tot.power.size(); ++k) tot.power[k] += part.power[k];
      });
  acc.normalize();
  return acc;
}

}  // namespace spdc
