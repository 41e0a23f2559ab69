// spdcsim: imaging of parametric down-converted photons through an
// aperture-and-lens Fourier system. Subcommands map to the experiments;
// `preset <name>` reproduces a whole experiment-style run.

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "spdc/spdc.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::vector<std::string> sets;
  std::string out_dir;
  bool strict = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "configuration file (key = value lines)");
  cmd->add_option("--set", o.sets, "override, key=value (repeatable)")->take_all();
  cmd->add_option("--out", o.out_dir, "output directory");
  cmd->add_flag("--strict", o.strict, "strict mode: deterministic, fail on sampling misses");
}

spdc::RunConfig resolve(const CommonOpts& o) {
  spdc::RunConfig cfg;
  if (!o.config_path.empty()) cfg = spdc::parse_config_file(o.config_path, cfg);
  for (const auto& s : o.sets) {
    auto eq = s.find('=');
    if (eq == std::string::npos)
      throw spdc::Error("config", "--set expects key=value, got: " + s);
    cfg.apply(s.substr(0, eq), s.substr(eq + 1));
  }
  if (!o.out_dir.empty()) cfg.output_dir = o.out_dir;
  if (o.strict) cfg.strict = true;
  return cfg;
}

int check_config(const spdc::RunConfig& cfg, bool print_ok) {
  auto violations = spdc::validate_config(cfg);
  if (!violations.empty()) {
    for (const auto& v : violations) std::cerr << "config violation: " << v << "\n";
    return 2;
  }
  if (print_ok) std::cout << "config ok\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SPDC aperture-imaging simulator"};
  app.require_subcommand(1);

  CommonOpts sim_o, preset_o, val_o, scan_o, flat_o;
  std::string preset_name;

  CLI::App* sim = app.add_subcommand("simulate", "single marginal-image run");
  add_common(sim, sim_o);

  CLI::App* preset = app.add_subcommand("preset", "run a named experiment preset");
  preset->add_option("name", preset_name,
                     "ring | close-aperture | ring-positions | pump-modes | "
                     "phase-flatten | focus-scan")
      ->required();
  add_common(preset, preset_o);

  CLI::App* val = app.add_subcommand("validate", "check a configuration");
  add_common(val, val_o);

  CLI::App* scan = app.add_subcommand("focus-scan", "image-plane scan vs aperture size");
  add_common(scan, scan_o);

  CLI::App* flat = app.add_subcommand("phase-flatten", "fork-hologram projection readout");
  add_common(flat, flat_o);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      spdc::RunConfig cfg = resolve(sim_o);
      if (int rc = check_config(cfg, false)) return rc;
      spdc::Pipeline p = spdc::make_pipeline(cfg);
      spdc::IntensityMap img = spdc::run_marginal(p);
      spdc::write_image(img, cfg.output_dir, "marginal");
      spdc::detail::write_manifest(cfg, cfg.output_dir);
      std::cout << "ncc_vs_pump = " << spdc::ncc(img, spdc::image_template(p)) << "\n";
    } else if (preset->parsed()) {
      spdc::RunConfig cfg = resolve(preset_o);
      if (int rc = check_config(cfg, false)) return rc;
      spdc::run_preset(preset_name, cfg, cfg.output_dir);
      std::cout << "wrote " << cfg.output_dir << "\n";
    } else if (val->parsed()) {
      return check_config(resolve(val_o), true);
    } else if (scan->parsed()) {
      spdc::RunConfig cfg = resolve(scan_o);
      if (int rc = check_config(cfg, false)) return rc;
      spdc::run_preset_focus_scan(cfg, cfg.output_dir);
      std::cout << "wrote " << cfg.output_dir << "\n";
    } else if (flat->parsed()) {
      spdc::RunConfig cfg = resolve(flat_o);
      if (int rc = check_config(cfg, false)) return rc;
      spdc::run_preset_phase_flatten(cfg, cfg.output_dir);
      std::cout << "wrote " << cfg.output_dir << "\n";
    }
  } catch (const spdc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return std::string(e.kind()) == "config" ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
