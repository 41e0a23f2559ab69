#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "spdc/biphoton.hpp"
#include "spdc/grid.hpp"
#include "spdc/modes.hpp"
#include "spdc/propagation.hpp"

namespace spdc {

// Pearson correlation of mean-subtracted pixel vectors, in [-1, 1].
inline double ncc(const IntensityMap& a, const IntensityMap& b) {
  if (!(a.grid.n == b.grid.n))
    throw Error("domain", "ncc requires equally sized images");
  std::size_t n = a.values.size();
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a.values[i];
    mb += b.values[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double da = a.values[i] - ma, db = b.values[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) throw Error("degenerate-image", "constant image in ncc");
  return sab / std::sqrt(saa * sbb);
}

namespace detail {

inline double bilinear_real(const IntensityMap& f, double x, double y) {
  const Grid2D& g = f.grid;
  double fx = x / g.pitch + g.n / 2;
  double fy = y / g.pitch + g.n / 2;
  int ix = static_cast<int>(std::floor(fx));
  int iy = static_cast<int>(std::floor(fy));
  if (ix < 0 || iy < 0 || ix + 1 >= g.n || iy + 1 >= g.n) return 0.0;
  double tx = fx - ix, ty = fy - iy;
  return (1 - tx) * (1 - ty) * f.at(ix, iy) + tx * (1 - ty) * f.at(ix + 1, iy) +
         (1 - tx) * ty * f.at(ix, iy + 1) + tx * ty * f.at(ix + 1, iy + 1);
}

}  // namespace detail

constexpr int kHarmonicMax = 16;

// Angular Fourier power of the radially integrated intensity about `center`.
inline std::array<double, kHarmonicMax + 1> azimuthal_harmonics(const IntensityMap& img,
                                                                Vec2 center = {0.0, 0.0}) {
  const Grid2D& g = img.grid;
  if (std::abs(center.x) > g.half_window() || std::abs(center.y) > g.half_window())
    throw Error("domain", "harmonics center outside the grid");
  const int nphi = 256;
  const int nr = g.n / 2;
  const double dr = g.pitch;
  std::vector<double> ring(nphi, 0.0);
  for (int m = 0; m < nphi; ++m) {
    double phi = 2.0 * M_PI * m / nphi;
    double c = std::cos(phi), s = std::sin(phi);
    double acc = 0.0;
    for (int j = 0; j < nr; ++j) {
      double r = (j + 0.5) * dr;
      acc += r * detail::bilinear_real(img, center.x + r * c, center.y + r * s);
    }
    ring[m] = acc * dr;
  }
  std::array<double, kHarmonicMax + 1> out{};
  for (int h = 0; h <= kHarmonicMax; ++h) {
    cplx c{0.0, 0.0};
    for (int m = 0; m < nphi; ++m) {
      double phi = 2.0 * M_PI * m / nphi;
      c += ring[m] * std::exp(cplx(0.0, -h * phi));
    }
    out[h] = std::norm(c / static_cast<double>(nphi));
  }
  return out;
}

// out(x) = in(x / scale): magnifies the image by `scale` about the center.
inline IntensityMap resample_intensity(const IntensityMap& img, double scale) {
  if (!(scale != 0.0)) throw Error("domain", "resample scale must be nonzero");
  IntensityMap out = make_intensity(img.grid);
  out.norm = img.norm;
  const Grid2D& g = img.grid;
  for (int iy = 0; iy < g.n; ++iy)
    for (int ix = 0; ix < g.n; ++ix)
      out.at(ix, iy) = detail::bilinear_real(img, g.coord(ix) / scale, g.coord(iy) / scale);
  return out;
}

// Variance-of-Laplacian sharpness metric.
inline double sharpness(const IntensityMap& img) {
  const Grid2D& g = img.grid;
  double mean = 0.0;
  std::vector<double> lap;
  lap.reserve(g.size());
  for (int iy = 1; iy + 1 < g.n; ++iy)
    for (int ix = 1; ix + 1 < g.n; ++ix) {
      double v = img.at(ix + 1, iy) + img.at(ix - 1, iy) + img.at(ix, iy + 1) +
                 img.at(ix, iy - 1) - 4.0 * img.at(ix, iy);
      lap.push_back(v);
      mean += v;
    }
  mean /= lap.size();
  double var = 0.0;
  for (double v : lap) var += (v - mean) * (v - mean);
  return var / lap.size();
}

// Pump intensity template at the image plane: the pump profile evaluated at
// the train's geometric magnification. Evaluated directly (no containment
// guard) so that large magnified waists on small preview grids still work.
inline IntensityMap pump_template(const PumpSpec& spec, double magnification,
                                  const Grid2D& grid) {
  spec.validate();
  double w = spec.waist_m * std::abs(magnification);
  IntensityMap out = make_intensity(grid);
  for (int iy = 0; iy < grid.n; ++iy) {
    double y = grid.coord(iy);
    for (int ix = 0; ix < grid.n; ++ix) {
      double x = grid.coord(ix);
      double rho = std::hypot(x, y);
      double phi = std::atan2(y, x);
      cplx v{0.0, 0.0};
      for (const auto& t : spec.terms)
        v += t.coeff * detail::lg_amplitude(t.p, t.l, w, rho, phi);
      out.at(ix, iy) = std::norm(v);
    }
  }
  out.normalize(Normalization::peak1);
  return out;
}

struct FocusScanResult {
  double aperture_diameter_m = 0.0;
  std::vector<double> z1_samples;
  std::vector<double> metric_curve;     // NCC vs pump template, per z1
  std::vector<double> sharpness_curve;  // variance-of-Laplacian cross check
  double best_z1 = 0.0;
  double depth_of_focus = 0.0;
};

namespace detail {

// Width of the interval where the curve stays >= 0.9 * max, with linear
// interpolation at the crossings.
inline void best_and_depth(const std::vector<double>& z, const std::vector<double>& m,
                           double& best, double& depth) {
  std::size_t imax = 0;
  for (std::size_t i = 1; i < m.size(); ++i)
    if (m[i] > m[imax]) imax = i;
  best = z[imax];
  double level = 0.9 * m[imax];
  double lo = z.front(), hi = z.back();
  for (std::size_t i = imax; i-- > 0;) {
    if (m[i] < level) {
      double t = (level - m[i]) / (m[i + 1] - m[i]);
      lo = z[i] + t * (z[i + 1] - z[i]);
      break;
    }
  }
  for (std::size_t i = imax + 1; i < m.size(); ++i) {
    if (m[i] < level) {
      double t = (level - m[i - 1]) / (m[i] - m[i - 1]);
      hi = z[i - 1] + t * (z[i] - z[i - 1]);
      break;
    }
  }
  depth = hi - lo;
}

}  // namespace detail

struct FocusScanConfig {
  double z0 = 0.05;
  double focal = 0.10;
  Vec2 aperture_center{0.0, 0.0};
  bool farfield = true;
  std::size_t chunk_size = 64;
};

// Imaging geometry swept over aperture diameter and camera distance z1.
// Under the far-field model the aperture-plane field is computed once per
// component; each z1 then costs one transform (the z1 - f drift is applied as
// a quadratic phase at the aperture, which is the camera's Fourier plane).
// Under the Fresnel model the lens-exit spectrum is reused the same way.
inline std::vector<FocusScanResult> focus_scan(const PumpSpec& pump,
                                               const BiphotonAmplitude& bi,
                                               const std::vector<double>& diameters,
                                               const std::vector<double>& z1_samples,
                                               const FocusScanConfig& cfg = {}) {
  if (diameters.empty() || z1_samples.empty())
    throw Error("domain", "focus scan needs diameters and z1 samples");
  double k0 = 2.0 * M_PI / bi.crystal.signal_wavelength_m;
  Grid2D pos_grid{bi.signal_grid.n, bi.signal_grid.conjugate_pitch(), Domain::position};
  Grid2D ap_grid{bi.signal_grid.n, bi.signal_grid.pitch * cfg.z0 / k0, Domain::position};
  Grid2D cam_grid{bi.signal_grid.n,
                  2.0 * M_PI * cfg.focal / (bi.signal_grid.n * ap_grid.pitch * k0),
                  Domain::position};
  Grid2D out_grid = cfg.farfield ? cam_grid : pos_grid;
  using Stack = std::vector<IntensityMap>;

  std::vector<FocusScanResult> results;
  for (double d : diameters) {
    ApertureSpec ap{d, cfg.aperture_center};
    ap.validate(cfg.farfield ? ap_grid : pos_grid);
    auto make_acc = [&] { return Stack(z1_samples.size(), make_intensity(out_grid)); };
    auto combine = [](Stack& tot, Stack&& part) {
      for (std::size_t zi = 0; zi < tot.size(); ++zi)
        for (std::size_t j = 0; j < tot[zi].values.size(); ++j)
          tot[zi].values[j] += part[zi].values[j];
    };
    Stack stack;
    if (cfg.farfield) {
      stack = chunked_reduce(
          bi.samples.size(), cfg.chunk_size, make_acc,
          [&](Stack& acc, std::size_t i) {
            ComplexField iris = far_field_of_spectrum(bi.signal_field(i), cfg.z0, true);
            iris = apply_aperture(iris, ap);
            if (iris.power() == 0.0) return;
            double w = bi.samples[i].weight;
            for (std::size_t zi = 0; zi < z1_samples.size(); ++zi) {
              double drift = z1_samples[zi] - cfg.focal;
              ComplexField h = iris;
              if (drift != 0.0) {
                double c = -drift * k0 / (2.0 * cfg.focal * cfg.focal);
                for (int iy = 0; iy < h.grid.n; ++iy) {
                  double y = h.grid.coord(iy);
                  for (int ix = 0; ix < h.grid.n; ++ix) {
                    double x = h.grid.coord(ix);
                    h.at(ix, iy) *= std::exp(cplx(0.0, c * (x * x + y * y)));
                  }
                }
              }
              ComplexField u = fourier_image_stage(h, cfg.focal);
              for (std::size_t j = 0; j < u.values.size(); ++j)
                acc[zi].values[j] += w * std::norm(u.values[j]);
            }
          },
          combine);
    } else {
      stack = chunked_reduce(
          bi.samples.size(), cfg.chunk_size, make_acc,
          [&](Stack& acc, std::size_t i) {
            ComplexField f = to_position(bi.signal_field(i));
            f = propagate_otf(f, cfg.z0);
            f = apply_aperture(f, ap);
            f = propagate_otf(f, cfg.focal);
            f = lens_stage(f, cfg.focal);
            ComplexField mom = to_momentum(f);
            double w = bi.samples[i].weight;
            for (std::size_t zi = 0; zi < z1_samples.size(); ++zi) {
              ComplexField m2 = mom;
              for (int iy = 0; iy < m2.grid.n; ++iy) {
                double ky = m2.grid.coord(iy);
                for (int ix = 0; ix < m2.grid.n; ++ix) {
                  double kx = m2.grid.coord(ix);
                  m2.at(ix, iy) *=
                      std::exp(cplx(0.0, -z1_samples[zi] * (kx * kx + ky * ky) / (2.0 * k0)));
                }
              }
              ComplexField u = to_position(m2);
              for (std::size_t j = 0; j < u.values.size(); ++j)
                acc[zi].values[j] += w * std::norm(u.values[j]);
            }
          },
          combine);
    }

    FocusScanResult res;
    res.aperture_diameter_m = d;
    res.z1_samples = z1_samples;
    for (std::size_t zi = 0; zi < z1_samples.size(); ++zi) {
      // Geometric magnification of the pump structure: chief rays leave the
      // aperture center at angle x/z0, so the image scale is B/z0 with B
      // taken from the aperture-to-camera ray matrix.
      OpticalTrain after;
      after.elements = {FreeSpace{cfg.focal}, Lens{cfg.focal}, FreeSpace{z1_samples[zi]}};
      double mag = abcd_of(after).b / cfg.z0;
      IntensityMap tmpl = pump_template(pump, mag, out_grid);
      stack[zi].normalize(Normalization::peak1);
      res.metric_curve.push_back(ncc(stack[zi], tmpl));
      res.sharpness_curve.push_back(sharpness(stack[zi]));
    }
    detail::best_and_depth(res.z1_samples, res.metric_curve, res.best_z1,
                           res.depth_of_focus);
    results.push_back(std::move(res));
  }
  return results;
}

}  // namespace spdc
