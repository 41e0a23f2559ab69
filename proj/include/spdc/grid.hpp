#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "spdc/errors.hpp"

namespace spdc {

using cplx = std::complex<double>;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline double norm2(Vec2 v) { return v.x * v.x + v.y * v.y; }
inline double norm(Vec2 v) { return std::sqrt(norm2(v)); }
inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }

enum class Domain { position, momentum };

// Square sampling grid, n samples per axis (power of two), zero at the
// array center (index n/2). Pitch is meters in position space and
// rad/m in momentum space.
struct Grid2D {
  int n = 256;
  double pitch = 16e-6;
  Domain domain = Domain::position;

  double coord(int i) const { return (i - n / 2) * pitch; }
  double half_window() const { return 0.5 * n * pitch; }
  std::size_t size() const { return static_cast<std::size_t>(n) * n; }

  bool operator==(const Grid2D& o) const {
    return n == o.n && pitch == o.pitch && domain == o.domain;
  }

  // Pitch of the Fourier-conjugate grid.
  double conjugate_pitch() const { return 2.0 * M_PI / (n * pitch); }

  void validate() const {
    if (n < 16 || (n & (n - 1)) != 0)
      throw Error("domain", "grid n must be a power of two >= 16");
    if (!(pitch > 0.0)) throw Error("domain", "grid pitch must be > 0");
  }
};

struct ComplexField {
  Grid2D grid;
  std::vector<cplx> values;
  double wavelength_m = 810e-9;

  cplx& at(int ix, int iy) { return values[static_cast<std::size_t>(iy) * grid.n + ix]; }
  const cplx& at(int ix, int iy) const {
    return values[static_cast<std::size_t>(iy) * grid.n + ix];
  }

  // Discrete power, sum |v|^2 * pitch^2.
  double power() const {
    double s = 0.0;
    for (const auto& v : values) s += std::norm(v);
    return s * grid.pitch * grid.pitch;
  }

  double wavenumber() const { return 2.0 * M_PI / wavelength_m; }
};

inline ComplexField make_field(const Grid2D& grid, double wavelength_m) {
  grid.validate();
  ComplexField f;
  f.grid = grid;
  f.values.assign(grid.size(), cplx{0.0, 0.0});
  f.wavelength_m = wavelength_m;
  return f;
}

enum class Normalization { peak1, unit_sum, raw };

struct IntensityMap {
  Grid2D grid;
  std::vector<double> values;
  Normalization norm = Normalization::raw;

  double& at(int ix, int iy) { return values[static_cast<std::size_t>(iy) * grid.n + ix]; }
  const double& at(int ix, int iy) const {
    return values[static_cast<std::size_t>(iy) * grid.n + ix];
  }

  double peak() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, v);
    return m;
  }

  double total() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }

  void normalize(Normalization target) {
    if (target == Normalization::raw) return;
    double s = (target == Normalization::peak1) ? peak() : total();
    if (s > 0.0)
      for (double& v : values) v /= s;
    norm = target;
  }
};

inline IntensityMap make_intensity(const Grid2D& grid) {
  IntensityMap m;
  m.grid = grid;
  m.values.assign(grid.size(), 0.0);
  return m;
}

inline IntensityMap intensity_of(const ComplexField& f) {
  IntensityMap m = make_intensity(f.grid);
  for (std::size_t i = 0; i < f.values.size(); ++i) m.values[i] = std::norm(f.values[i]);
  return m;
}

}  // namespace spdc
