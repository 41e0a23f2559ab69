#include <catch_amalgamated.hpp>

#include "spdc/fft.hpp"
#include "spdc/modes.hpp"
#include "test_util.hpp"

using namespace spdc;
using Catch::Approx;

namespace {

Grid2D pos_grid(int n, double pitch) { return Grid2D{n, pitch, Domain::position}; }

double inner_abs(const ComplexField& a, const ComplexField& b) {
  cplx s{0.0, 0.0};
  for (std::size_t i = 0; i < a.values.size(); ++i) s += std::conj(a.values[i]) * b.values[i];
  return std::abs(s) * a.grid.pitch * a.grid.pitch;
}

}  // namespace

TEST_CASE("lg mode closed-form center amplitude", "[modes]") {
  Grid2D g = pos_grid(64, 1e-3 / 16.0);
  ComplexField f = lg_mode(0, 0, 1e-3, g, 405e-9);
  // (1/w) sqrt(2/pi) at the axis for the fundamental
  cplx c = f.at(g.n / 2, g.n / 2);
  CHECK(c.real() == Approx(797.8845608).epsilon(1e-6));
  CHECK(c.imag() == Approx(0.0).margin(1e-9));
}

TEST_CASE("lg mode on-axis null and phase winding for l=3", "[modes]") {
  Grid2D g = pos_grid(128, 2e-5);
  ComplexField f = lg_mode(0, 3, 0.5e-3, g, 405e-9);
  CHECK(std::abs(f.at(g.n / 2, g.n / 2)) == Approx(0.0).margin(1e-12));
  // winding e^{-i l phi}: phase at +x minus phase at +y is +l*pi/2 (mod 2pi)
  double ph_x = std::arg(f.at(g.n / 2 + 20, g.n / 2));
  double ph_y = std::arg(f.at(g.n / 2, g.n / 2 + 20));
  double d = std::remainder(ph_x - ph_y, 2.0 * M_PI);
  CHECK(d == Approx(3.0 * M_PI / 2.0 - 2.0 * M_PI).margin(1e-9));
}

TEST_CASE("lg modes are orthonormal on a fine grid", "[modes]") {
  Grid2D g = pos_grid(512, 1.0 / 512.0);
  double w = g.n * g.pitch / 8.0;
  struct M {
    int p, l;
  };
  std::vector<M> ms{{0, 0}, {0, 1}, {0, 2}, {1, 0}, {1, 1}, {0, -1}};
  std::vector<ComplexField> fields;
  for (auto m : ms) fields.push_back(lg_mode(m.p, m.l, w, g, 405e-9));
  for (std::size_t i = 0; i < fields.size(); ++i)
    for (std::size_t j = 0; j < fields.size(); ++j) {
      double ip = inner_abs(fields[i], fields[j]);
      if (i == j)
        CHECK(ip == Approx(1.0).margin(1e-3));
      else
        CHECK(ip < 1e-3);
    }
}

TEST_CASE("lg mode azimuthal purity", "[modes]") {
  Grid2D g = pos_grid(256, 2e-5);
  ComplexField f = lg_mode(0, 2, 1e-3, g, 405e-9);
  // project onto e^{-i m phi} on a mid ring; the l=2 share must dominate
  double r = 1e-3;
  const int nphi = 512;
  std::vector<cplx> ring(nphi);
  double tot = 0.0;
  std::array<double, 7> pw{};
  for (int m = 0; m < nphi; ++m) {
    double phi = 2.0 * M_PI * m / nphi;
    int ix = g.n / 2 + static_cast<int>(std::lround(r * std::cos(phi) / g.pitch));
    int iy = g.n / 2 + static_cast<int>(std::lround(r * std::sin(phi) / g.pitch));
    ring[m] = f.at(ix, iy);
  }
  for (int l = -3; l <= 3; ++l) {
    cplx c{0.0, 0.0};
    for (int m = 0; m < nphi; ++m) {
      double phi = 2.0 * M_PI * m / nphi;
      c += ring[m] * std::exp(cplx(0.0, l * phi));
    }
    pw[static_cast<std::size_t>(l + 3)] = std::norm(c);
    tot += std::norm(c);
  }
  CHECK(pw[5] / tot > 0.999);  // l = +2 slot
}

TEST_CASE("lg mode grid guards", "[modes]") {
  Grid2D g = pos_grid(64, 1e-5);
  CHECK_THROWS_MATCHES(lg_mode(0, 0, 1e-5, g, 405e-9), Error, ErrorKind("grid-resolution"));
  CHECK_THROWS_MATCHES(lg_mode(0, 0, 1.0, g, 405e-9), Error, ErrorKind("grid-resolution"));
  CHECK_THROWS_MATCHES(lg_mode(-1, 0, 1e-4, g, 405e-9), Error, ErrorKind("domain"));
  CHECK_THROWS_MATCHES(lg_mode(0, 0, -1e-4, g, 405e-9), Error, ErrorKind("domain"));
}

TEST_CASE("superpose of +1/-1 has a nodal line and unit power", "[modes]") {
  Grid2D g = pos_grid(256, 1.6e-5);
  PumpSpec spec{{{0, 1, {1.0, 0.0}}, {0, -1, {-1.0, 0.0}}}, 0.7e-3};
  ComplexField f = superpose(spec, g, 405e-9);
  CHECK(f.power() == Approx(1.0).epsilon(1e-6));
  // (|+1> - |-1>)/sqrt2 ~ sin(phi): zero along y=0, bright along x=0
  double on_node = std::abs(f.at(g.n / 2 + 30, g.n / 2));
  double off_node = std::abs(f.at(g.n / 2, g.n / 2 + 30));
  CHECK(on_node < 1e-10 * off_node + 1e-12);
  CHECK(off_node > 0.0);
}

TEST_CASE("superpose of +2/-2 has four petals", "[modes]") {
  Grid2D g = pos_grid(256, 1.6e-5);
  PumpSpec spec{{{0, 2, {1.0, 0.0}}, {0, -2, {-1.0, 0.0}}}, 0.7e-3};
  ComplexField f = superpose(spec, g, 405e-9);
  // intensity ~ sin^2(2 phi): count sign structure on a ring
  double r = 0.7e-3 / std::sqrt(2.0);
  auto val = [&](double phi) {
    int ix = g.n / 2 + static_cast<int>(std::lround(r * std::cos(phi) / g.pitch));
    int iy = g.n / 2 + static_cast<int>(std::lround(r * std::sin(phi) / g.pitch));
    return std::norm(f.at(ix, iy));
  };
  double peak = val(M_PI / 4.0);
  CHECK(val(0.0) < 0.02 * peak);
  CHECK(val(M_PI / 2.0) < 0.02 * peak);
  CHECK(val(3.0 * M_PI / 4.0) == Approx(peak).epsilon(0.1));
}

TEST_CASE("superpose validation", "[modes]") {
  Grid2D g = pos_grid(64, 1e-4);
  PumpSpec empty{{}, 1e-3};
  CHECK_THROWS_MATCHES(superpose(empty, g, 405e-9), Error, ErrorKind("degenerate-spec"));
  PumpSpec zeros{{{0, 1, {0.0, 0.0}}, {0, -1, {0.0, 0.0}}}, 1e-3};
  CHECK_THROWS_MATCHES(superpose(zeros, g, 405e-9), Error, ErrorKind("degenerate-spec"));
  PumpSpec single{{{0, 1, {0.5, 0.0}}}, 1e-3};
  ComplexField f = superpose(single, g, 405e-9);
  CHECK(f.power() == Approx(1.0).epsilon(1e-6));  // renormalized
}

TEST_CASE("momentum-space gaussian has waist 2/w and matches the FFT", "[modes]") {
  Grid2D g = pos_grid(256, 1.6e-5);
  double w = 0.5e-3;
  ComplexField f = lg_mode(0, 0, w, g, 405e-9);
  ComplexField numeric = to_momentum(f);
  const Grid2D& mg = numeric.grid;
  double worst = 0.0, scale = 0.0;
  for (int iy = 0; iy < mg.n; ++iy)
    for (int ix = 0; ix < mg.n; ++ix) {
      cplx a = lg_momentum_amplitude(0, 0, w, mg.coord(ix), mg.coord(iy));
      worst = std::max(worst, std::abs(numeric.at(ix, iy) - a));
      scale = std::max(scale, std::abs(a));
    }
  CHECK(worst < 1e-4 * scale);
  // 1/e^2 intensity radius in momentum space is 2/w
  double peak = std::norm(lg_momentum_amplitude(0, 0, w, 0.0, 0.0));
  double at_waist = std::norm(lg_momentum_amplitude(0, 0, w, 2.0 / w, 0.0));
  CHECK(at_waist / peak == Approx(std::exp(-2.0)).epsilon(1e-6));
}

TEST_CASE("fft roundtrip and power conservation", "[modes]") {
  Grid2D g = pos_grid(128, 2e-5);
  ComplexField f = lg_mode(1, 2, 0.4e-3, g, 405e-9);
  ComplexField back = to_position(to_momentum(f));
  double worst = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i)
    worst = std::max(worst, std::abs(f.values[i] - back.values[i]));
  CHECK(worst < 1e-10);
  CHECK(to_momentum(f).power() == Approx(f.power()).epsilon(1e-12));
}

TEST_CASE("pump momentum spectrum is deterministic", "[modes]") {
  PumpSpec spec{{{0, 3, {1.0, 0.0}}, {1, -2, {0.0, 1.0}}}, 0.8e-3};
  PumpMomentumFn a = pump_spectrum(spec);
  PumpMomentumFn b = pump_spectrum(spec);
  for (double q : {0.0, 313.0, 4096.5, 19999.0}) {
    cplx va = a(q, 0.3 * q), vb = b(q, 0.3 * q);
    CHECK(va.real() == vb.real());
    CHECK(va.imag() == vb.imag());
  }
}

TEST_CASE("pump momentum cutoff bounds the support", "[modes]") {
  PumpSpec spec{{{0, 2, {1.0, 0.0}}}, 1e-3};
  double cutoff = pump_momentum_cutoff(spec);
  PumpMomentumFn fn = pump_spectrum(spec);
  double inside = std::abs(fn(0.3 * cutoff, 0.0));
  double outside = std::abs(fn(1.05 * cutoff, 0.0));
  CHECK(inside > 0.0);
  CHECK(outside < 1e-6 * inside);
}
