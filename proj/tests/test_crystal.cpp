#include <catch_amalgamated.hpp>

#include "spdc/crystal.hpp"
#include "test_util.hpp"

using namespace spdc;
using Catch::Approx;

TEST_CASE("bbo sellmeier indices at the working wavelengths", "[crystal]") {
  IndexModel m;
  CHECK(m.n_ordinary(405e-9) == Approx(1.692299).margin(1e-3));
  CHECK(m.n_ordinary(810e-9) == Approx(1.661072).margin(1e-3));
  CHECK(m.n_extraordinary(405e-9) == Approx(1.567966).margin(1e-3));
}

TEST_CASE("extraordinary index interpolates between principal values", "[crystal]") {
  IndexModel m;
  double no = m.n_ordinary(405e-9);
  double ne = m.n_extraordinary(405e-9);
  CHECK(refractive_index(m, 405e-9, Polarization::extraordinary, 0.0) == Approx(no));
  CHECK(refractive_index(m, 405e-9, Polarization::extraordinary, M_PI / 2.0) == Approx(ne));
  double mid = refractive_index(m, 405e-9, Polarization::extraordinary, M_PI / 4.0);
  CHECK(mid < no);
  CHECK(mid > ne);
  CHECK(refractive_index(m, 405e-9, Polarization::ordinary, M_PI / 3.0) == Approx(no));
}

TEST_CASE("dispersion model rejects wavelengths outside validity", "[crystal]") {
  IndexModel m;
  CHECK_THROWS_MATCHES(m.n_ordinary(0.2e-6), Error, ErrorKind("dispersion-range"));
  CHECK_THROWS_MATCHES(m.n_ordinary(1.5e-6), Error, ErrorKind("dispersion-range"));
}

TEST_CASE("crystal validation", "[crystal]") {
  CrystalParams c;
  CHECK_NOTHROW(c.validate());
  c.length_m = 0.0;
  CHECK_THROWS_MATCHES(c.validate(), Error, ErrorKind("domain"));
  c.length_m = 5e-3;
  c.signal_wavelength_m = 800e-9;
  CHECK_THROWS_MATCHES(c.validate(), Error, ErrorKind("domain"));
}

TEST_CASE("pump wavenumber uses the tilted extraordinary index", "[crystal]") {
  CrystalParams c;
  CHECK(c.pump_wavenumber() == Approx(2.573039e7).epsilon(1e-4));
  double n = c.pump_wavenumber() * c.pump_wavelength_m / (2.0 * M_PI);
  CHECK(n < c.index_model.n_ordinary(405e-9));
  CHECK(n > c.index_model.n_extraordinary(405e-9));
}

TEST_CASE("delta k is symmetric under signal/idler exchange", "[crystal]") {
  CrystalParams c;
  Vec2 a{3e5, -1e5}, b{-2e5, 4e5};
  CHECK(delta_k(a, b, c) == Approx(delta_k(b, a, c)).margin(1e-9));
  // and under parity
  CHECK(delta_k(a, b, c) ==
        Approx(delta_k({-a.x, -a.y}, {-b.x, -b.y}, c)).margin(1e-6));
}

TEST_CASE("delta k rejects evanescent momenta", "[crystal]") {
  CrystalParams c;
  double ks = c.signal_wavenumber();
  CHECK_THROWS_MATCHES(delta_k({1.01 * ks, 0.0}, {0.0, 0.0}, c), Error,
                       ErrorKind("evanescent"));
}

TEST_CASE("phase matching weight", "[crystal]") {
  CrystalParams c;
  double ring = ring_radius(c);
  // on the ring the mismatch vanishes: weight is exactly 1
  cplx w = phase_matching_weight({ring, 0.0}, {-ring, 0.0}, c);
  CHECK(std::abs(w - cplx(1.0, 0.0)) < 1e-9);
  // off the ring: |weight| <= 1, and the phase flag drops the imaginary part
  cplx w2 = phase_matching_weight({0.8 * ring, 0.0}, {-0.8 * ring, 0.0}, c);
  CHECK(std::abs(w2) <= 1.0);
  cplx w3 = phase_matching_weight({0.8 * ring, 0.0}, {-0.8 * ring, 0.0}, c, false);
  CHECK(w3.imag() == 0.0);
  CHECK(std::abs(w3) == Approx(std::abs(w2)).margin(1e-12));
}

TEST_CASE("collinear cut angle root", "[crystal]") {
  CrystalParams c;
  double theta = collinear_cut_angle(c);
  CHECK(theta * 180.0 / M_PI == Approx(28.6704).margin(0.01));
  CrystalParams at = c;
  at.cut_angle_rad = theta;
  CHECK(std::abs(delta_k({0.0, 0.0}, {0.0, 0.0}, at)) < 1e-6 * at.pump_wavenumber());
}

TEST_CASE("ring radius at the working cut angle", "[crystal]") {
  CrystalParams c;
  double ring = ring_radius(c);
  CHECK(ring == Approx(7.1358e5).epsilon(1e-3));
  // mismatch vanishes there
  CHECK(std::abs(detail::symmetric_delta_k(ring, c)) < 1e-6 * c.pump_wavenumber());
  // collinear at the collinear cut: no ring
  CrystalParams cc = c;
  cc.cut_angle_rad = collinear_cut_angle(c) - 0.1 * M_PI / 180.0;
  CHECK(ring_radius(cc) == 0.0);
}

TEST_CASE("phase matched annulus brackets the ring", "[crystal]") {
  CrystalParams c;
  Annulus a = phase_matched_annulus(c, 0.05);
  CHECK(a.r_lo == Approx(7.0437e5).epsilon(1e-3));
  CHECK(a.r_hi == Approx(7.2268e5).epsilon(1e-3));
  double ring = ring_radius(c);
  CHECK(a.r_lo < ring);
  CHECK(a.r_hi > ring);
  // edges sit at the requested sinc^2 level
  for (double r : {a.r_lo, a.r_hi}) {
    double arg = 0.5 * detail::symmetric_delta_k(r, c) * c.length_m;
    CHECK(sinc(arg) * sinc(arg) == Approx(0.05).margin(1e-6));
  }
  // a tighter threshold gives a narrower annulus
  Annulus b = phase_matched_annulus(c, 0.5);
  CHECK(b.r_lo > a.r_lo);
  CHECK(b.r_hi < a.r_hi);
}
