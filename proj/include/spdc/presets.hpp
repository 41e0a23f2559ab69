#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "spdc/analysis.hpp"
#include "spdc/config.hpp"
#include "spdc/holography.hpp"
#include "spdc/io.hpp"

namespace spdc {

inline PumpSpec pump_lg(int l, double waist_m) { return PumpSpec{{{0, l, {1.0, 0.0}}}, waist_m}; }

inline PumpSpec pump_superposition(int l, double waist_m, double relative_sign = -1.0) {
  return PumpSpec{{{0, l, {1.0, 0.0}}, {0, -l, {relative_sign, 0.0}}}, waist_m};
}

// Everything a single imaging run needs, assembled from a config.
struct Pipeline {
  RunConfig cfg;
  PumpSpec pump;
  CrystalParams crystal;
  Grid2D grid;  // position-domain signal grid (beam frame)
  Vec2 frame;
  BiphotonAmplitude bi;
};

inline Pipeline make_pipeline(const RunConfig& cfg) {
  Pipeline p;
  p.cfg = cfg;
  p.pump = make_pump(cfg);
  p.crystal = make_crystal(cfg);
  p.grid = make_position_grid(cfg);
  p.frame = make_frame(cfg, p.crystal);
  IdlerSampling sampling = make_sampling(cfg, p.crystal, p.grid, p.frame);
  BiphotonOptions opt;
  opt.frame = p.frame;
  opt.include_mismatch_phase = cfg.mismatch_phase;
  opt.strict = cfg.strict;
  p.bi = build_biphoton(p.pump, p.crystal, p.grid, sampling, opt);
  return p;
}

// Marginal image through the imaging arm with the config's aperture and z1.
inline IntensityMap run_marginal(const Pipeline& p) {
  return marginal_image(p.bi, make_chain(p.cfg));
}

// Grid the marginal lives on (camera plane).
inline Grid2D camera_grid(const Pipeline& p) {
  return chain_camera_grid(make_chain(p.cfg), p.grid, p.crystal.signal_wavelength_m);
}

inline double imaging_magnification(const RunConfig& cfg) {
  OpticalTrain after;
  after.elements = {FreeSpace{cfg.train_focal_m}, Lens{cfg.train_focal_m},
                    FreeSpace{cfg.train_z1_m}};
  return abcd_of(after).b / cfg.train_z0_m;
}

inline IntensityMap image_template(const Pipeline& p) {
  return pump_template(p.pump, imaging_magnification(p.cfg), camera_grid(p));
}

// Angular spectrum of the full SPDC ring, on a momentum grid that covers the
// annulus. Azimuthal sampling is raised until adjacent idler samples are
// closer than the pump momentum width, which keeps the quadrature smooth.
inline IntensityMap ring_spectrum(const RunConfig& cfg) {
  PumpSpec pump = make_pump(cfg);
  CrystalParams crystal = make_crystal(cfg);
  Annulus a = phase_matched_annulus(crystal, cfg.idler_threshold);
  Grid2D mg{cfg.grid_n, 2.3 * a.r_hi / cfg.grid_n, Domain::momentum};
  IdlerSampling s = annulus_sampling(crystal, cfg.idler_radial, cfg.idler_azimuthal,
                                     cfg.idler_threshold);
  double pump_width = 2.0 / pump.waist_m;
  double target = std::max(pump_width, mg.pitch);
  int nphi = static_cast<int>(std::ceil(2.0 * M_PI * a.r_hi / target));
  s.n_azimuthal = std::max(s.n_azimuthal, std::min(nphi, 8192));
  BiphotonOptions opt;
  opt.include_mismatch_phase = cfg.mismatch_phase;
  BiphotonAmplitude bi = build_biphoton(pump, crystal, mg, s, opt);
  return angular_spectrum(bi);
}

// Lab-frame camera image of the SPDC ring with the aperture fully open. A
// single beam frame only spans one azimuthal sector of the annulus (the
// momentum window is much smaller than the ring radius), so the full ring is
// stitched from marginals computed at several frame azimuths. Grid axes are
// never rotated, so each sector maps onto the lab camera by the pure shift
// f*frame/k0 that the dropped carrier tilt would have produced.
inline IntensityMap ring_image(const RunConfig& cfg, int n_sectors = 32) {
  CrystalParams crystal = make_crystal(cfg);
  double k0 = 2.0 * M_PI / crystal.signal_wavelength_m;
  double f = cfg.train_focal_m;
  double ring = ring_radius(crystal);
  Grid2D lab{cfg.grid_n, 2.8 * f * ring / (k0 * cfg.grid_n), Domain::position};
  IntensityMap out = make_intensity(lab);
  for (int j = 0; j < n_sectors; ++j) {
    RunConfig c = cfg;
    c.frame_azimuth_deg = 360.0 * j / n_sectors;
    Grid2D apg = make_aperture_grid(c);
    c.aperture_diameter_um = 0.96 * apg.n * apg.pitch * 1e6;
    CrystalParams cr = make_crystal(c);
    Grid2D grid = make_position_grid(c);
    Vec2 frame = make_frame(c, cr);
    // idler azimuths clipped to the sector tile so the stitched tiles never
    // double count; the azimuthal sample density matches make_sampling's
    IdlerSampling full = make_sampling(c, cr, grid, frame);
    double tile = M_PI / n_sectors;
    int n_az = std::max(4, static_cast<int>(std::ceil(
                               full.n_azimuthal * tile / full.phi_half_width)));
    IdlerSampling s = sector_sampling(cr, grid, frame, full.n_radial, n_az,
                                      c.idler_threshold, ring * std::sin(tile));
    BiphotonOptions opt;
    opt.frame = frame;
    opt.include_mismatch_phase = c.mismatch_phase;
    BiphotonAmplitude bi = build_biphoton(make_pump(c), cr, grid, s, opt);
    ImagingChain ch = make_chain(c);
    Grid2D cam = chain_camera_grid(ch, bi.signal_grid, cr.signal_wavelength_m);
    IntensityMap img = map_components(
        bi, ch, [&] { return make_intensity(cam); },
        [](IntensityMap& a, std::size_t, double w, const ChainStage& st) {
          for (std::size_t q = 0; q < st.camera.values.size(); ++q)
            a.values[q] += w * std::norm(st.camera.values[q]);
        },
        [](IntensityMap& tot, IntensityMap&& part) {
          for (std::size_t q = 0; q < tot.values.size(); ++q)
            tot.values[q] += part.values[q];
        });
    Vec2 shift{f * frame.x / k0, f * frame.y / k0};
    for (int iy = 0; iy < lab.n; ++iy)
      for (int ix = 0; ix < lab.n; ++ix)
        out.at(ix, iy) += detail::bilinear_real(img, lab.coord(ix) - shift.x,
                                                lab.coord(iy) - shift.y);
  }
  out.normalize(Normalization::peak1);
  return out;
}

// --- experiment presets ------------------------------------------------------

namespace detail {

inline void write_manifest(const RunConfig& cfg, const std::filesystem::path& dir,
                           const std::vector<std::string>& extra = {}) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / "manifest.txt");
  out << cfg.serialize();
  for (const auto& line : extra) out << "# " << line << "\n";
}

inline std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

}  // namespace detail

// The SPDC annular ring (angular spectrum of a Gaussian-pumped run).
inline void run_preset_ring(RunConfig cfg, const std::filesystem::path& dir) {
  cfg.pump_terms = {{0, 0, {1.0, 0.0}}};
  IntensityMap ring = ring_spectrum(cfg);
  write_image(ring, dir, "ring");
  detail::write_manifest(cfg, dir,
                         {"ring_radius_rad_per_m = " +
                          detail::fmt(ring_radius(make_crystal(cfg)))});
}

// The open-aperture ring image resampled prediction: the angular spectrum
// mapped to the camera through x = f q / k0.
inline IntensityMap imaged_spectrum(const RunConfig& cfg, const Grid2D& lab) {
  CrystalParams crystal = make_crystal(cfg);
  double k0 = 2.0 * M_PI / crystal.signal_wavelength_m;
  double scale = k0 / cfg.train_focal_m;
  IntensityMap spec = ring_spectrum(cfg);
  IntensityMap out = make_intensity(lab);
  for (int iy = 0; iy < lab.n; ++iy)
    for (int ix = 0; ix < lab.n; ++ix)
      out.at(ix, iy) =
          detail::bilinear_real(spec, lab.coord(ix) * scale, lab.coord(iy) * scale);
  out.normalize(Normalization::peak1);
  return out;
}

// Prediction for the open-aperture camera image: each idler component lands
// at x = f q / k0 as a copy of the magnified pump image, so the marginal is
// the imaged angular spectrum convolved with the pump intensity template.
inline IntensityMap open_ring_prediction(const RunConfig& cfg, const Grid2D& lab) {
  IntensityMap ringmap = imaged_spectrum(cfg, lab);
  IntensityMap psf = pump_template(make_pump(cfg), imaging_magnification(cfg), lab);
  ComplexField a = make_field(lab, make_crystal(cfg).signal_wavelength_m);
  ComplexField b = a;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    a.values[i] = ringmap.values[i];
    b.values[i] = psf.values[i];
  }
  ComplexField fa = to_momentum(a), fb = to_momentum(b);
  for (std::size_t i = 0; i < fa.values.size(); ++i) fa.values[i] *= fb.values[i];
  ComplexField conv = to_position(fa);
  IntensityMap out = make_intensity(lab);
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] = std::max(0.0, conv.values[i].real());
  out.normalize(Normalization::peak1);
  return out;
}

// Gradual closure of the aperture, image at the 2f plane. The fully open case
// is the stitched lab-frame ring; the rest are beam-frame marginals.
inline void run_preset_close_aperture(RunConfig cfg, const std::filesystem::path& dir) {
  IntensityMap open_img = ring_image(cfg);
  write_image(open_img, dir, "aperture_open");
  IntensityMap tmpl = pump_template(make_pump(cfg), imaging_magnification(cfg),
                                    open_img.grid);
  IntensityMap predicted = open_ring_prediction(cfg, open_img.grid);
  write_image(predicted, dir, "ring_prediction");
  write_csv(dir / "open_ring.csv", {"ncc_vs_pump", "ncc_vs_spectrum"},
            {{ncc(open_img, tmpl), ncc(open_img, predicted)}});
  std::vector<double> diameters_um{2000.0, 1000.0, 500.0, 250.0, 102.3};
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < diameters_um.size(); ++i) {
    RunConfig c = cfg;
    c.aperture_diameter_um = diameters_um[i];
    Pipeline p = make_pipeline(c);
    IntensityMap img = run_marginal(p);
    write_image(img, dir, "aperture_" + std::to_string(i));
    rows.push_back({diameters_um[i], ncc(img, image_template(p))});
  }
  write_csv(dir / "ncc_vs_diameter.csv", {"diameter_um", "ncc_vs_pump"}, rows);
  detail::write_manifest(cfg, dir);
}

// The aperture at eight azimuthal positions on the ring.
inline void run_preset_ring_positions(RunConfig cfg, const std::filesystem::path& dir,
                                      std::vector<IntensityMap>* images_out = nullptr) {
  std::vector<IntensityMap> images;
  for (int i = 0; i < 8; ++i) {
    RunConfig c = cfg;
    c.frame_azimuth_deg = 45.0 * i;
    Pipeline p = make_pipeline(c);
    images.push_back(run_marginal(p));
    write_image(images.back(), dir, "position_" + std::to_string(i));
  }
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < images.size(); ++i) {
    std::vector<double> row;
    row.push_back(static_cast<double>(i));
    for (std::size_t j = 0; j < images.size(); ++j)
      row.push_back(ncc(images[i], images[j]));
    rows.push_back(row);
  }
  std::vector<std::string> header{"position"};
  for (std::size_t j = 0; j < images.size(); ++j) header.push_back("ncc_" + std::to_string(j));
  write_csv(dir / "ncc_matrix.csv", header, rows);
  detail::write_manifest(cfg, dir);
  if (images_out) *images_out = std::move(images);
}

// Vortex pumps of orders 1..3 and their coaxial superpositions. The annular
// null survives the idler trace only when the idler-momentum smear is small
// against the vortex core, so this preset runs with a wide pump on a coarse
// grid, a proportionally wider iris, and the mismatch phase tilt disabled.
inline RunConfig pump_modes_config(RunConfig cfg) {
  cfg.grid_pitch_um = 25.0;
  cfg.pump_waist_mm = 1.6;
  cfg.aperture_diameter_um = 246.4;
  cfg.mismatch_phase = false;
  return cfg;
}

inline void run_preset_pump_modes(RunConfig cfg_in, const std::filesystem::path& dir) {
  RunConfig cfg = pump_modes_config(cfg_in);
  double w = cfg.pump_waist_mm * 1e-3;
  struct Case {
    std::string name;
    PumpSpec pump;
  };
  std::vector<Case> cases;
  for (int l = 1; l <= 3; ++l) cases.push_back({"lg" + std::to_string(l), pump_lg(l, w)});
  for (int l = 1; l <= 3; ++l)
    cases.push_back({"sup" + std::to_string(l), pump_superposition(l, w)});
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    RunConfig c = cfg;
    c.pump_terms = cases[i].pump.terms;
    Pipeline p = make_pipeline(c);
    IntensityMap img = run_marginal(p);
    write_image(img, dir, cases[i].name);
    double central = img.at(img.grid.n / 2, img.grid.n / 2) / img.peak();
    auto harm = azimuthal_harmonics(img);
    int dominant = 1;
    for (int h = 2; h <= kHarmonicMax; ++h)
      if (harm[h] > harm[dominant]) dominant = h;
    rows.push_back({static_cast<double>(i), central, static_cast<double>(dominant)});
  }
  write_csv(dir / "mode_metrics.csv", {"case", "central_over_peak", "dominant_harmonic"},
            rows);
  detail::write_manifest(cfg, dir);
}

struct PhaseFlattenReadout {
  int fork_order;
  double central_intensity;
  IntensityMap image;
};

inline PhaseFlattenReadout phase_flatten_readout(const Pipeline& p, int fork_order) {
  Grid2D grid = camera_grid(p);
  ForkHologram holo =
      fork_hologram(fork_order, p.cfg.hologram_period_px * grid.pitch, grid);
  IntensityMap img = diffract_first_order(p.bi, make_chain(p.cfg), holo);
  double central = img.at(grid.n / 2, grid.n / 2);
  return {fork_order, central, std::move(img)};
}

// Control experiment: a coherent classical LG beam at the signal wavelength
// through the identical iris and lens, read out on a fork. The matched fork
// restores the on-axis intensity, which proves the readout would detect an
// azimuthal phase if the marginal carried one.
inline double coherent_control_central(const RunConfig& cfg, int beam_l, int fork_order) {
  ImagingChain ch = make_chain(cfg);
  CrystalParams crystal = make_crystal(cfg);
  ComplexField beam = lg_mode(0, beam_l, cfg.pump_waist_mm * 1e-3,
                              make_position_grid(cfg), crystal.signal_wavelength_m);
  ComplexField cam;
  if (ch.farfield) {
    ComplexField iris = far_field_of_spectrum(to_momentum(beam), ch.z0_m, true);
    iris = apply_aperture(iris, ch.aperture);
    cam = fourier_image_stage(iris, ch.focal_m);
    if (ch.z1_m != ch.focal_m) cam = propagate_otf(cam, ch.z1_m - ch.focal_m);
  } else {
    cam = run_train(beam, ch.as_train());
  }
  ForkHologram holo =
      fork_hologram(fork_order, cfg.hologram_period_px * cam.grid.pitch, cam.grid);
  IntensityMap img = diffract_first_order(cam, holo);
  return img.at(cam.grid.n / 2, cam.grid.n / 2) / img.peak();
}

// Marginal components arrive at the camera displaced by the idler kick, which
// widens the beam spectrum there; a 6 px carrier keeps the first order
// separated where the default 8 px carrier trips the overlap guard.
inline RunConfig phase_flatten_config(RunConfig cfg) {
  cfg.hologram_period_px = 6.0;
  return cfg;
}

// Phase flattening of the marginal; Gaussian pump on {0,+1,-1} forks,
// third-order vortex pump on {0,+3,-3} forks.
inline void run_preset_phase_flatten(RunConfig cfg_in, const std::filesystem::path& dir) {
  RunConfig cfg = phase_flatten_config(cfg_in);
  std::vector<std::vector<double>> rows;
  auto run_case = [&](const std::string& name, const PumpSpec& pump,
                      const std::vector<int>& forks) {
    RunConfig c = cfg;
    c.pump_terms = pump.terms;
    Pipeline p = make_pipeline(c);
    for (int f : forks) {
      PhaseFlattenReadout r = phase_flatten_readout(p, f);
      write_image(r.image, dir, name + "_fork" + (f < 0 ? "m" : "p") + std::to_string(std::abs(f)));
      rows.push_back({static_cast<double>(rows.size()), static_cast<double>(f),
                      r.central_intensity});
    }
  };
  double w = cfg.pump_waist_mm * 1e-3;
  run_case("gauss", pump_lg(0, w), {0, 1, -1});
  run_case("vortex3", pump_lg(3, w), {0, 3, -3});
  write_csv(dir / "first_order_central.csv", {"case", "fork_order", "central_intensity"},
            rows);
  write_csv(dir / "coherent_control.csv", {"fork_order", "central_over_peak"},
            {{3.0, coherent_control_central(cfg, 3, 3)},
             {-3.0, coherent_control_central(cfg, 3, -3)}});
  detail::write_manifest(cfg, dir);
}

// Image-plane shift versus aperture size.
inline void run_preset_focus_scan(RunConfig cfg, const std::filesystem::path& dir) {
  cfg.pump_terms = pump_superposition(2, cfg.pump_waist_mm * 1e-3).terms;
  Pipeline p = make_pipeline(cfg);
  std::vector<double> z1;
  for (double z = cfg.scan_z1_min_cm; z <= cfg.scan_z1_max_cm + 1e-9;
       z += cfg.scan_z1_step_cm)
    z1.push_back(z * 1e-2);
  std::vector<double> diameters;
  for (double d : cfg.scan_diameters_um) diameters.push_back(d * 1e-6);
  FocusScanConfig fc;
  fc.z0 = cfg.train_z0_m;
  fc.focal = cfg.train_focal_m;
  fc.farfield = cfg.train_farfield;
  fc.aperture_center = make_aperture(cfg).center;
  auto results = focus_scan(p.pump, p.bi, diameters, z1, fc);
  std::vector<std::vector<double>> rows;
  std::vector<std::vector<double>> summary;
  for (const auto& r : results) {
    for (std::size_t zi = 0; zi < r.z1_samples.size(); ++zi)
      rows.push_back({r.aperture_diameter_m * 1e6, r.z1_samples[zi] * 1e2,
                      r.metric_curve[zi], r.sharpness_curve[zi]});
    summary.push_back({r.aperture_diameter_m * 1e6, r.best_z1 * 1e2,
                       r.depth_of_focus * 1e2});
  }
  write_csv(dir / "focus_scan.csv", {"diameter_um", "z1_cm", "ncc", "sharpness"}, rows);
  write_csv(dir / "focus_summary.csv", {"diameter_um", "best_z1_cm", "depth_of_focus_cm"},
            summary);
  detail::write_manifest(cfg, dir);
}

inline void run_preset(const std::string& name, const RunConfig& cfg,
                       const std::filesystem::path& dir) {
  if (name == "ring") run_preset_ring(cfg, dir);
  else if (name == "close-aperture") run_preset_close_aperture(cfg, dir);
  else if (name == "ring-positions") run_preset_ring_positions(cfg, dir);
  else if (name == "pump-modes") run_preset_pump_modes(cfg, dir);
  else if (name == "phase-flatten") run_preset_phase_flatten(cfg, dir);
  else if (name == "focus-scan") run_preset_focus_scan(cfg, dir);
  else
    throw Error("config", "unknown preset: " + name +
                              " (expected ring, close-aperture, ring-positions, "
                              "pump-modes, phase-flatten, focus-scan)");
}

}  // namespace spdc
