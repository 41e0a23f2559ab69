#include <catch_amalgamated.hpp>

#include <cmath>

#include "spdc/analysis.hpp"
#include "spdc/presets.hpp"
#include "test_util.hpp"

using namespace spdc;
using Catch::Approx;

namespace {

Grid2D pos_grid(int n, double pitch) { return Grid2D{n, pitch, Domain::position}; }

IntensityMap gaussian_spot(const Grid2D& g, Vec2 c, double sigma) {
  IntensityMap img = make_intensity(g);
  for (int iy = 0; iy < g.n; ++iy)
    for (int ix = 0; ix < g.n; ++ix) {
      double dx = g.coord(ix) - c.x, dy = g.coord(iy) - c.y;
      img.at(ix, iy) = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
    }
  return img;
}

// Ring with an optional m-fold azimuthal modulation rotated by phi0.
IntensityMap petal_ring(const Grid2D& g, double r0, double sigma, int m,
                        double depth, double phi0 = 0.0) {
  IntensityMap img = make_intensity(g);
  for (int iy = 0; iy < g.n; ++iy)
    for (int ix = 0; ix < g.n; ++ix) {
      double x = g.coord(ix), y = g.coord(iy);
      double r = std::hypot(x, y), phi = std::atan2(y, x);
      double radial = std::exp(-(r - r0) * (r - r0) / (2.0 * sigma * sigma));
      img.at(ix, iy) = radial * (1.0 + depth * std::cos(m * (phi - phi0)));
    }
  return img;
}

}  // namespace

TEST_CASE("ncc of an image with itself and with its negative", "[analysis]") {
  Grid2D g = pos_grid(64, 1e-5);
  IntensityMap a = gaussian_spot(g, {5e-5, -3e-5}, 8e-5);
  CHECK(ncc(a, a) == Approx(1.0).margin(1e-12));
  IntensityMap neg = a;
  double peak = a.peak();
  for (auto& v : neg.values) v = peak - v;
  CHECK(ncc(a, neg) == Approx(-1.0).margin(1e-12));
}

TEST_CASE("ncc is symmetric and affine invariant", "[analysis]") {
  Grid2D g = pos_grid(64, 1e-5);
  IntensityMap a = gaussian_spot(g, {0.0, 0.0}, 6e-5);
  IntensityMap b = gaussian_spot(g, {4e-5, 0.0}, 9e-5);
  double r = ncc(a, b);
  CHECK(ncc(b, a) == Approx(r).margin(1e-12));
  IntensityMap scaled = a;
  for (auto& v : scaled.values) v = 3.7 * v + 0.4;
  CHECK(ncc(scaled, b) == Approx(r).margin(1e-9));
}

TEST_CASE("ncc rejects mismatched and constant images", "[analysis]") {
  Grid2D g = pos_grid(64, 1e-5);
  Grid2D h = pos_grid(32, 1e-5);
  IntensityMap a = gaussian_spot(g, {0.0, 0.0}, 6e-5);
  CHECK_THROWS_MATCHES(ncc(a, make_intensity(h)), Error, ErrorKind("domain"));
  IntensityMap flat = make_intensity(g);
  for (auto& v : flat.values) v = 0.5;
  CHECK_THROWS_MATCHES(ncc(a, flat), Error, ErrorKind("degenerate-image"));
}

TEST_CASE("disjoint spots are weakly anti-correlated", "[analysis]") {
  Grid2D g = pos_grid(64, 1e-5);
  IntensityMap a = gaussian_spot(g, {-2e-4, 0.0}, 3e-5);
  IntensityMap b = gaussian_spot(g, {2e-4, 0.0}, 3e-5);
  double r = ncc(a, b);
  CHECK(r < 0.0);
  CHECK(std::abs(r) < 0.2);
}

TEST_CASE("four petal image has dominant azimuthal harmonic four", "[analysis]") {
  Grid2D g = pos_grid(128, 1e-5);
  IntensityMap img = petal_ring(g, 4e-4, 8e-5, 4, 0.9);
  auto h = azimuthal_harmonics(img);
  int dominant = 1;
  for (int m = 2; m <= kHarmonicMax; ++m)
    if (h[m] > h[dominant]) dominant = m;
  CHECK(dominant == 4);
}

TEST_CASE("uniform ring concentrates harmonic power at m zero", "[analysis]") {
  Grid2D g = pos_grid(128, 1e-5);
  IntensityMap img = petal_ring(g, 4e-4, 8e-5, 1, 0.0);
  auto h = azimuthal_harmonics(img);
  double total = 0.0;
  for (double v : h) total += v;
  CHECK(h[0] / total >= 0.95);
}

TEST_CASE("harmonic magnitudes are rotation invariant", "[analysis]") {
  Grid2D g = pos_grid(128, 1e-5);
  auto h0 = azimuthal_harmonics(petal_ring(g, 4e-4, 8e-5, 4, 0.9, 0.0));
  auto h1 = azimuthal_harmonics(petal_ring(g, 4e-4, 8e-5, 4, 0.9, 0.5));
  for (int m = 0; m <= kHarmonicMax; ++m)
    CHECK(h1[m] == Approx(h0[m]).margin(1e-3 * h0[0]).epsilon(0.02));
}

TEST_CASE("harmonics center must lie inside the grid", "[analysis]") {
  Grid2D g = pos_grid(64, 1e-5);
  IntensityMap img = gaussian_spot(g, {0.0, 0.0}, 6e-5);
  CHECK_THROWS_MATCHES(azimuthal_harmonics(img, {1.0, 0.0}), Error, ErrorKind("domain"));
}

TEST_CASE("resampling by a scale and back recovers the image", "[analysis]") {
  Grid2D g = pos_grid(128, 1e-5);
  IntensityMap img = gaussian_spot(g, {3e-5, -2e-5}, 1e-4);
  IntensityMap back = resample_intensity(resample_intensity(img, 1.3), 1.0 / 1.3);
  CHECK(ncc(img, back) >= 0.99);
  CHECK_THROWS_MATCHES(resample_intensity(img, 0.0), Error, ErrorKind("domain"));
}

TEST_CASE("resampling magnifies feature positions", "[analysis]") {
  Grid2D g = pos_grid(128, 1e-5);
  IntensityMap img = gaussian_spot(g, {2e-4, 0.0}, 3e-5);
  IntensityMap mag = resample_intensity(img, 2.0);
  // the spot should now peak near x = 4e-4
  int best = 0;
  for (int ix = 0; ix < g.n; ++ix)
    if (mag.at(ix, g.n / 2) > mag.at(best, g.n / 2)) best = ix;
  CHECK(g.coord(best) == Approx(4e-4).margin(2.0 * g.pitch));
}

TEST_CASE("sharpness drops when a spot is blurred", "[analysis]") {
  Grid2D g = pos_grid(128, 1e-5);
  IntensityMap tight = gaussian_spot(g, {0.0, 0.0}, 3e-5);
  IntensityMap blurred = gaussian_spot(g, {0.0, 0.0}, 1.2e-4);
  CHECK(sharpness(tight) > sharpness(blurred));
}

TEST_CASE("pump template renders magnified mode structure", "[analysis]") {
  Grid2D g = pos_grid(128, 2e-5);
  PumpSpec hg{{{0, 1, {1.0, 0.0}}, {0, -1, {-1.0, 0.0}}}, 2e-4};
  IntensityMap t1 = pump_template(hg, 1.0, g);
  CHECK(t1.peak() == Approx(1.0).margin(1e-12));
  CHECK(t1.at(g.n / 2, g.n / 2) < 1e-6);  // nodal line of the two-lobe mode
  IntensityMap t2 = pump_template(hg, 2.0, g);
  CHECK(ncc(t2, resample_intensity(t1, 2.0)) >= 0.99);
}

TEST_CASE("depth of focus interpolates the ninety percent crossings", "[analysis]") {
  std::vector<double> z{0.0, 1.0, 2.0, 3.0, 4.0};
  std::vector<double> m{0.2, 0.6, 1.0, 0.6, 0.2};
  double best = 0.0, depth = 0.0;
  spdc::detail::best_and_depth(z, m, best, depth);
  CHECK(best == Approx(2.0));
  // crossings of 0.9 between the samples at distance 0.25 either side
  CHECK(depth == Approx(0.5).margin(1e-12));
  // flat curve never crosses: depth spans the whole range
  std::vector<double> flat{1.0, 1.0, 1.0, 1.0, 1.0};
  spdc::detail::best_and_depth(z, flat, best, depth);
  CHECK(depth == Approx(4.0));
}

TEST_CASE("focus scan returns aligned deterministic curves", "[analysis]") {
  RunConfig c;
  c.grid_n = 64;
  c.grid_pitch_um = 64.0;
  c.pump_waist_mm = 0.5;
  c.idler_radial = 4;
  c.idler_azimuthal = 6;
  Pipeline p = make_pipeline(c);
  FocusScanConfig fc;
  fc.aperture_center = make_aperture(c).center;
  std::vector<double> z1{0.08, 0.10, 0.12};
  auto run = [&] { return focus_scan(p.pump, p.bi, {102.3e-6}, z1, fc); };
  auto r1 = run();
  REQUIRE(r1.size() == 1);
  CHECK(r1[0].z1_samples == z1);
  CHECK(r1[0].metric_curve.size() == z1.size());
  CHECK(r1[0].sharpness_curve.size() == z1.size());
  bool member = false;
  for (double z : z1) member = member || z == r1[0].best_z1;
  CHECK(member);
  auto r2 = run();
  CHECK(r1[0].metric_curve == r2[0].metric_curve);
  CHECK_THROWS_MATCHES(focus_scan(p.pump, p.bi, {}, z1, fc), Error, ErrorKind("domain"));
}
