#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "spdc/biphoton.hpp"
#include "spdc/crystal.hpp"
#include "spdc/modes.hpp"
#include "spdc/propagation.hpp"

namespace spdc {

inline constexpr const char* kVersion = "0.1.0";

// Flat, human-readable run configuration. Dotted keys, one `key = value`
// per line, '#' comments. The serialized form doubles as the run manifest:
// feeding it back reproduces the run.
struct RunConfig {
  // pump.*
  std::vector<LgTerm> pump_terms{{0, 1, {1.0, 0.0}}, {0, -1, {-1.0, 0.0}}};
  double pump_waist_mm = 1.0;

  // crystal.*
  double crystal_length_mm = 5.0;
  double crystal_cut_angle_deg = 29.97;
  double crystal_pump_nm = 405.0;
  double crystal_signal_nm = 810.0;
  double crystal_idler_nm = 810.0;
  std::vector<double> index_model_coeffs;  // empty = built-in BBO set

  // grid.*
  int grid_n = 256;
  double grid_pitch_um = 16.0;

  // frame.*  (signal-arm axis: azimuthal position of the aperture on the ring)
  double frame_azimuth_deg = 0.0;
  double frame_radius = -1.0;  // <0 = auto (phase-matched ring radius)

  // idler.*
  int idler_radial = 32;
  int idler_azimuthal = 32;
  double idler_threshold = 0.05;
  double idler_sector_deg = -1.0;  // <0 = auto from the signal window

  // train.*
  bool train_farfield = true;  // z0_model: farfield | fresnel
  double train_z0_m = 0.05;
  double train_focal_m = 0.10;
  double train_z1_m = 0.10;
  double aperture_diameter_um = 102.3;
  double aperture_center_x_um = 0.0;
  double aperture_center_y_um = 0.0;

  // biphoton.*
  bool mismatch_phase = true;

  // hologram.*
  int hologram_fork_order = 0;
  double hologram_period_px = 8.0;

  // scan.*
  double scan_z1_min_cm = 6.0;
  double scan_z1_max_cm = 20.0;
  double scan_z1_step_cm = 0.5;
  std::vector<double> scan_diameters_um{102.3, 132.5, 174.4, 246.4};

  // output.*
  std::string output_dir = "out";

  bool strict = false;
  long seed = 0;  // reserved; the pipeline is deterministic

  void apply(const std::string& key, const std::string& value);
  std::string serialize() const;
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline std::vector<double> parse_numbers(const std::string& v) {
  std::vector<double> out;
  std::istringstream iss(v);
  double x;
  while (iss >> x) out.push_back(x);
  return out;
}

inline std::vector<LgTerm> parse_terms(const std::string& v) {
  // "p,l,re[,im] ; p,l,re[,im] ; ..."
  std::vector<LgTerm> out;
  std::istringstream groups(v);
  std::string g;
  while (std::getline(groups, g, ';')) {
    g = trim(g);
    if (g.empty()) continue;
    for (auto& c : g)
      if (c == ',') c = ' ';
    std::istringstream iss(g);
    double p, l, re, im = 0.0;
    if (!(iss >> p >> l >> re)) throw Error("config", "bad pump term: " + g);
    iss >> im;
    out.push_back({static_cast<int>(p), static_cast<int>(l), {re, im}});
  }
  if (out.empty()) throw Error("config", "pump.terms is empty");
  return out;
}

inline bool parse_bool(const std::string& v) {
  if (v == "true" || v == "on" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "off" || v == "0" || v == "no") return false;
  throw Error("config", "bad boolean: " + v);
}

}  // namespace detail

inline void RunConfig::apply(const std::string& key, const std::string& value) {
  using detail::parse_bool;
  const std::string v = detail::trim(value);
  auto num = [&v, &key]() {
    try {
      std::size_t pos = 0;
      double d = std::stod(v, &pos);
      if (detail::trim(v.substr(pos)).empty()) return d;
    } catch (const std::exception&) {
    }
    throw Error("config", "bad number for " + key + ": " + v);
  };

  if (key == "pump.terms") pump_terms = detail::parse_terms(v);
  else if (key == "pump.waist_mm") pump_waist_mm = num();
  else if (key == "crystal.length_mm") crystal_length_mm = num();
  else if (key == "crystal.cut_angle_deg") crystal_cut_angle_deg = num();
  else if (key == "crystal.pump_nm") crystal_pump_nm = num();
  else if (key == "crystal.signal_nm") crystal_signal_nm = num();
  else if (key == "crystal.idler_nm") crystal_idler_nm = num();
  else if (key == "crystal.index_model") {
    index_model_coeffs = detail::parse_numbers(v);
    if (index_model_coeffs.size() != 8)
      throw Error("config", "crystal.index_model needs 8 Sellmeier coefficients");
  } else if (key == "grid.n") grid_n = static_cast<int>(num());
  else if (key == "grid.pitch_um") grid_pitch_um = num();
  else if (key == "frame.azimuth_deg") frame_azimuth_deg = num();
  else if (key == "frame.radius") frame_radius = (v == "auto" ? -1.0 : num());
  else if (key == "idler.radial") idler_radial = static_cast<int>(num());
  else if (key == "idler.azimuthal") idler_azimuthal = static_cast<int>(num());
  else if (key == "idler.threshold") idler_threshold = num();
  else if (key == "idler.sector_deg") idler_sector_deg = (v == "auto" ? -1.0 : num());
  else if (key == "train.z0_model") {
    if (v == "farfield") train_farfield = true;
    else if (v == "fresnel") train_farfield = false;
    else throw Error("config", "train.z0_model must be farfield or fresnel");
  } else if (key == "train.z0_m") train_z0_m = num();
  else if (key == "train.focal_m") train_focal_m = num();
  else if (key == "train.z1_m") train_z1_m = num();
  else if (key == "aperture.diameter_um") aperture_diameter_um = num();
  else if (key == "aperture.center_x_um") aperture_center_x_um = num();
  else if (key == "aperture.center_y_um") aperture_center_y_um = num();
  else if (key == "biphoton.mismatch_phase") mismatch_phase = parse_bool(v);
  else if (key == "hologram.fork_order") hologram_fork_order = static_cast<int>(num());
  else if (key == "hologram.period_px") hologram_period_px = num();
  else if (key == "scan.z1_min_cm") scan_z1_min_cm = num();
  else if (key == "scan.z1_max_cm") scan_z1_max_cm = num();
  else if (key == "scan.z1_step_cm") scan_z1_step_cm = num();
  else if (key == "scan.diameters_um") scan_diameters_um = detail::parse_numbers(v);
  else if (key == "output.dir") output_dir = v;
  else if (key == "strict") strict = parse_bool(v);
  else if (key == "seed") seed = static_cast<long>(num());
  else throw Error("config", "unknown key: " + key);
}

inline RunConfig parse_config_text(std::istream& in, RunConfig base = {}) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error("config", "line " + std::to_string(lineno) + ": expected key = value");
    base.apply(detail::trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return base;
}

inline RunConfig parse_config_file(const std::string& path, RunConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw Error("config", "cannot open config file " + path);
  return parse_config_text(in, base);
}

inline std::string RunConfig::serialize() const {
  std::ostringstream out;
  out.precision(15);
  out << "# spdcsim manifest (version " << kVersion << ")\n";
  out << "pump.terms =";
  for (std::size_t i = 0; i < pump_terms.size(); ++i)
    out << (i ? " ; " : " ") << pump_terms[i].p << "," << pump_terms[i].l << ","
        << pump_terms[i].coeff.real() << "," << pump_terms[i].coeff.imag();
  out << "\n";
  out << "pump.waist_mm = " << pump_waist_mm << "\n";
  out << "crystal.length_mm = " << crystal_length_mm << "\n";
  out << "crystal.cut_angle_deg = " << crystal_cut_angle_deg << "\n";
  out << "crystal.pump_nm = " << crystal_pump_nm << "\n";
  out << "crystal.signal_nm = " << crystal_signal_nm << "\n";
  out << "crystal.idler_nm = " << crystal_idler_nm << "\n";
  if (!index_model_coeffs.empty()) {
    out << "crystal.index_model =";
    for (double c : index_model_coeffs) out << " " << c;
    out << "\n";
  }
  out << "grid.n = " << grid_n << "\n";
  out << "grid.pitch_um = " << grid_pitch_um << "\n";
  out << "frame.azimuth_deg = " << frame_azimuth_deg << "\n";
  out << "frame.radius = " << (frame_radius < 0 ? "auto" : std::to_string(frame_radius)) << "\n";
  out << "idler.radial = " << idler_radial << "\n";
  out << "idler.azimuthal = " << idler_azimuthal << "\n";
  out << "idler.threshold = " << idler_threshold << "\n";
  out << "idler.sector_deg = "
      << (idler_sector_deg < 0 ? "auto" : std::to_string(idler_sector_deg)) << "\n";
  out << "train.z0_model = " << (train_farfield ? "farfield" : "fresnel") << "\n";
  out << "train.z0_m = " << train_z0_m << "\n";
  out << "train.focal_m = " << train_focal_m << "\n";
  out << "train.z1_m = " << train_z1_m << "\n";
  out << "aperture.diameter_um = " << aperture_diameter_um << "\n";
  out << "aperture.center_x_um = " << aperture_center_x_um << "\n";
  out << "aperture.center_y_um = " << aperture_center_y_um << "\n";
  out << "biphoton.mismatch_phase = " << (mismatch_phase ? "on" : "off") << "\n";
  out << "hologram.fork_order = " << hologram_fork_order << "\n";
  out << "hologram.period_px = " << hologram_period_px << "\n";
  out << "scan.z1_min_cm = " << scan_z1_min_cm << "\n";
  out << "scan.z1_max_cm = " << scan_z1_max_cm << "\n";
  out << "scan.z1_step_cm = " << scan_z1_step_cm << "\n";
  out << "scan.diameters_um =";
  for (double d : scan_diameters_um) out << " " << d;
  out << "\n";
  out << "output.dir = " << output_dir << "\n";
  out << "strict = " << (strict ? "true" : "false") << "\n";
  out << "seed = " << seed << "\n";
  return out.str();
}

// --- construction of simulation objects from a config -----------------------

inline PumpSpec make_pump(const RunConfig& c) {
  return PumpSpec{c.pump_terms, c.pump_waist_mm * 1e-3};
}

inline CrystalParams make_crystal(const RunConfig& c) {
  CrystalParams cr;
  cr.length_m = c.crystal_length_mm * 1e-3;
  cr.cut_angle_rad = c.crystal_cut_angle_deg * M_PI / 180.0;
  cr.pump_wavelength_m = c.crystal_pump_nm * 1e-9;
  cr.signal_wavelength_m = c.crystal_signal_nm * 1e-9;
  cr.idler_wavelength_m = c.crystal_idler_nm * 1e-9;
  if (!c.index_model_coeffs.empty()) {
    const auto& k = c.index_model_coeffs;
    cr.index_model.ord_a = k[0];
    cr.index_model.ord_b = k[1];
    cr.index_model.ord_c = k[2];
    cr.index_model.ord_d = k[3];
    cr.index_model.ext_a = k[4];
    cr.index_model.ext_b = k[5];
    cr.index_model.ext_c = k[6];
    cr.index_model.ext_d = k[7];
  }
  return cr;
}

inline Grid2D make_position_grid(const RunConfig& c) {
  return Grid2D{c.grid_n, c.grid_pitch_um * 1e-6, Domain::position};
}

inline Vec2 make_frame(const RunConfig& c, const CrystalParams& crystal) {
  double r = c.frame_radius >= 0.0 ? c.frame_radius : ring_radius(crystal);
  double phi = c.frame_azimuth_deg * M_PI / 180.0;
  return {r * std::cos(phi), r * std::sin(phi)};
}

inline IdlerSampling make_sampling(const RunConfig& c, const CrystalParams& crystal,
                                   const Grid2D& grid, Vec2 frame) {
  IdlerSampling s;
  if (c.idler_sector_deg < 0.0) {
    double acceptance = 0.0;
    if (c.train_farfield) {
      // Idler azimuths whose partner can still hit the iris: momentum reach
      // of the iris disc seen from the crystal, padded by the pump spread.
      double k0 = 2.0 * M_PI / (c.crystal_signal_nm * 1e-9);
      double reach_x = 0.5 * c.aperture_diameter_um * 1e-6 +
                       std::hypot(c.aperture_center_x_um, c.aperture_center_y_um) * 1e-6;
      acceptance = k0 * reach_x / c.train_z0_m + pump_momentum_cutoff(make_pump(c));
    }
    s = sector_sampling(crystal, grid, frame, c.idler_radial, c.idler_azimuthal,
                        c.idler_threshold, acceptance);
  } else {
    s = annulus_sampling(crystal, c.idler_radial, c.idler_azimuthal, c.idler_threshold);
    s.phi_center = std::atan2(-frame.y, -frame.x);
    s.phi_half_width = 0.5 * c.idler_sector_deg * M_PI / 180.0;
  }
  return s;
}

inline ApertureSpec make_aperture(const RunConfig& c) {
  return ApertureSpec{c.aperture_diameter_um * 1e-6,
                      {c.aperture_center_x_um * 1e-6, c.aperture_center_y_um * 1e-6}};
}

// Imaging arm: crystal -> z0 -> aperture -> f -> lens -> z1.
inline OpticalTrain make_train(const RunConfig& c) {
  OpticalTrain t;
  t.elements = {FreeSpace{c.train_z0_m}, make_aperture(c), FreeSpace{c.train_focal_m},
                Lens{c.train_focal_m}, FreeSpace{c.train_z1_m}};
  return t;
}

inline ImagingChain make_chain(const RunConfig& c) {
  ImagingChain ch;
  ch.z0_m = c.train_z0_m;
  ch.focal_m = c.train_focal_m;
  ch.z1_m = c.train_z1_m;
  ch.aperture = make_aperture(c);
  ch.farfield = c.train_farfield;
  return ch;
}

// Plane the aperture actually lives on for the configured z0 model.
inline Grid2D make_aperture_grid(const RunConfig& c) {
  Grid2D pos = make_position_grid(c);
  if (!c.train_farfield) return pos;
  ImagingChain ch = make_chain(c);
  return chain_aperture_grid(ch, pos, c.crystal_signal_nm * 1e-9);
}

// Checks every invariant and reports violations as data (empty = runnable).
inline std::vector<std::string> validate_config(const RunConfig& c) {
  std::vector<std::string> out;
  auto check = [&out](bool ok, const std::string& msg) {
    if (!ok) out.push_back(msg);
  };
  try {
    make_pump(c).validate();
  } catch (const Error& e) {
    out.push_back(std::string("pump: ") + e.what());
  }
  try {
    make_crystal(c).validate();
  } catch (const Error& e) {
    out.push_back(std::string("crystal: ") + e.what());
  }
  Grid2D grid = make_position_grid(c);
  try {
    grid.validate();
  } catch (const Error& e) {
    out.push_back(std::string("grid: ") + e.what());
  }
  check(c.idler_radial >= 1 && c.idler_azimuthal >= 1,
        "idler: sample counts must be >= 1");
  check(c.idler_threshold > 0.0 && c.idler_threshold < 1.0,
        "idler: threshold must be in (0, 1)");
  check(c.train_z0_m > 0.0, "train: z0_m must be > 0");
  check(c.train_focal_m != 0.0, "train: focal_m must be nonzero");
  Grid2D ap_grid = c.train_z0_m > 0.0 ? make_aperture_grid(c) : grid;
  check(c.aperture_diameter_um * 1e-6 >= 2.0 * ap_grid.pitch,
        "aperture-resolution: aperture narrower than 2 pixels");
  try {
    make_aperture(c).validate(ap_grid);
  } catch (const Error& e) {
    out.push_back(std::string("aperture: ") + e.what());
  }
  check(c.hologram_period_px >= 4.0, "hologram: period_px must be >= 4");
  check(c.scan_z1_step_cm > 0.0 && c.scan_z1_max_cm > c.scan_z1_min_cm,
        "scan: empty z1 range");
  check(!c.output_dir.empty(), "output: dir must be set");
  return out;
}

}  // namespace spdc
