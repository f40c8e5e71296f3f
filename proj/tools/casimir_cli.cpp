// Casimir free energy and pressure of a metal film: sweeps, comparisons and
// regression fixtures.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>

#include "casimir/config.hpp"
#include "casimir/constants.hpp"
#include "casimir/lifshitz.hpp"
#include "casimir/runner.hpp"

namespace {

constexpr int kConfigError = 1;
constexpr int kNumericalError = 2;

}  // namespace

int main(int argc, char** argv) {
  using namespace casimir;
  using namespace casimir::run;

  CLI::App app{"Casimir free energy and pressure of a metal film (Drude and plasma approaches)"};
  std::string config_path, command, approach, grid, out, format, data_file, film, plates;
  std::optional<double> a_nm, T_K, tol;
  std::optional<int> threads;
  bool log_space = false;
  app.add_option("--config", config_path, "TOML-style run configuration");
  app.add_option("--command", command, "sweep-thickness|sweep-temperature|point|compare|fixtures");
  app.add_option("--approach", approach, "drude|plasma|both");
  app.add_option("--a-nm", a_nm, "film thickness in nm");
  app.add_option("--T-K", T_K, "temperature in K");
  app.add_option("--grid", grid, "min,max,count,log|linear (nm or K)");
  app.add_option("--out", out, "output file (default stdout)");
  app.add_option("--format", format, "csv|json");
  app.add_option("--tol", tol, "relative tolerance in (0, 1e-2]");
  app.add_flag("--log-space", log_space, "allow thicknesses above 50 um; results carried in log magnitude");
  app.add_option("--data-file", data_file, "optical table (omega_eV n k) replacing the film permittivity");
  app.add_option("--film", film, "film material name");
  app.add_option("--plates", plates, "plate material name (vacuum, sapphire, or a configured material)");
  app.add_option("--threads", threads, "worker threads (0: all cores)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = load_config(config_path);
    if (!command.empty()) cfg.command = parse_command(command);
    if (!approach.empty()) cfg.approach = parse_approach(approach);
    if (!grid.empty()) cfg.grid = parse_grid(grid);
    if (!out.empty()) cfg.output = out;
    if (!format.empty()) cfg.format = parse_format(format);
    if (a_nm) cfg.thickness = *a_nm * constants::nm;
    if (T_K) cfg.temperature = *T_K;
    if (tol) cfg.tol = *tol;
    if (threads) cfg.threads = *threads;
    if (log_space) cfg.log_space = true;
    if (!film.empty()) cfg.film = find_material(cfg.materials, film);
    if (!plates.empty()) {
      cfg.plate_left = find_material(cfg.materials, plates);
      cfg.plate_right = cfg.plate_left;
    }
    if (!data_file.empty()) {
      if (!cfg.film.is_metal()) throw ConfigError("--data-file needs a metal film (omega_p for the extrapolation)");
      cfg.film.kind = MaterialKind::tabulated;
      cfg.film.name += "+table";
      cfg.film.table = std::make_shared<const OpticalTable>(load_optical_table(data_file));
    }
    cfg.validate();
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    if (cfg.output.empty()) return execute(cfg, std::cout);
    std::ofstream file(cfg.output);
    if (!file) {
      std::cerr << "config error: cannot write '" << cfg.output << "'\n";
      return kConfigError;
    }
    return execute(cfg, file);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  }
}
