#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "spdc/grid.hpp"

namespace spdc {

// Raw little-endian float64 array plus a text header sidecar with the grid
// metadata. The raw file is the source of truth; the .pgm is a preview.
inline void write_intensity_raw(const IntensityMap& img, const std::filesystem::path& stem) {
  std::ofstream raw(stem.string() + ".f64", std::ios::binary);
  if (!raw) throw Error("io", "cannot open " + stem.string() + ".f64 for writing");
  raw.write(reinterpret_cast<const char*>(img.values.data()),
            static_cast<std::streamsize>(img.values.size() * sizeof(double)));
  if (!raw) throw Error("io", "write failed for " + stem.string() + ".f64");

  std::ofstream hdr(stem.string() + ".hdr");
  hdr << "format float64-le\n"
      << "n " << img.grid.n << "\n"
      << "pitch " << img.grid.pitch << "\n"
      << "domain " << (img.grid.domain == Domain::position ? "position" : "momentum") << "\n"
      << "normalization "
      << (img.norm == Normalization::peak1
              ? "peak-1"
              : (img.norm == Normalization::unit_sum ? "unit-sum" : "raw"))
      << "\n";
}

inline void write_intensity_pgm(const IntensityMap& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("io", "cannot open " + path.string() + " for writing");
  double peak = img.peak();
  out << "P5\n" << img.grid.n << " " << img.grid.n << "\n255\n";
  std::vector<std::uint8_t> row(img.grid.n);
  for (int iy = 0; iy < img.grid.n; ++iy) {
    for (int ix = 0; ix < img.grid.n; ++ix) {
      double v = peak > 0.0 ? img.at(ix, iy) / peak : 0.0;
      row[ix] = static_cast<std::uint8_t>(std::lround(255.0 * std::clamp(v, 0.0, 1.0)));
    }
    out.write(reinterpret_cast<const char*>(row.data()), img.grid.n);
  }
}

inline void write_image(const IntensityMap& img, const std::filesystem::path& dir,
                        const std::string& name) {
  std::filesystem::create_directories(dir);
  write_intensity_raw(img, dir / name);
  write_intensity_pgm(img, dir / (name + ".pgm"));
}

inline IntensityMap read_intensity_raw(const std::filesystem::path& stem) {
  std::ifstream hdr(stem.string() + ".hdr");
  if (!hdr) throw Error("io", "cannot open " + stem.string() + ".hdr");
  Grid2D g;
  std::string key;
  std::string norm = "raw";
  while (hdr >> key) {
    if (key == "n")
      hdr >> g.n;
    else if (key == "pitch")
      hdr >> g.pitch;
    else if (key == "domain") {
      std::string d;
      hdr >> d;
      g.domain = d == "momentum" ? Domain::momentum : Domain::position;
    } else if (key == "normalization")
      hdr >> norm;
    else {
      std::string skip;
      hdr >> skip;
    }
  }
  IntensityMap img = make_intensity(g);
  img.norm = norm == "peak-1" ? Normalization::peak1
                              : (norm == "unit-sum" ? Normalization::unit_sum
                                                    : Normalization::raw);
  std::ifstream raw(stem.string() + ".f64", std::ios::binary);
  if (!raw) throw Error("io", "cannot open " + stem.string() + ".f64");
  raw.read(reinterpret_cast<char*>(img.values.data()),
           static_cast<std::streamsize>(img.values.size() * sizeof(double)));
  if (raw.gcount() != static_cast<std::streamsize>(img.values.size() * sizeof(double)))
    throw Error("io", "truncated raw image " + stem.string() + ".f64");
  return img;
}

inline void write_csv(const std::filesystem::path& path,
                      const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw Error("io", "cannot open " + path.string() + " for writing");
  for (std::size_t i = 0; i < header.size(); ++i)
    out << header[i] << (i + 1 < header.size() ? "," : "\n");
  out.precision(12);
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i)
      out << r[i] << (i + 1 < r.size() ? "," : "\n");
  }
}

}  // namespace spdc
