#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "casimir/asymptotics.hpp"
#include "casimir/lifshitz.hpp"
#include "casimir/materials.hpp"

namespace casimir::run {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command { sweep_thickness, sweep_temperature, point, compare, fixtures };
enum class ApproachChoice { drude, plasma, both };
enum class Format { csv, json };

using asymptotics::Approach;

Command parse_command(const std::string& text);
ApproachChoice parse_approach(const std::string& text);
Format parse_format(const std::string& text);
std::string to_string(Command c);
std::string to_string(ApproachChoice a);
std::string to_string(Approach a);

struct Grid {
  double min = 0.0;
  double max = 0.0;
  int count = 0;
  bool log = false;

  std::vector<double> points() const;
  void validate() const;
};

// "min,max,count[,log|linear]"
Grid parse_grid(const std::string& text);

enum class MaterialKind { vacuum, drude, plasma, oscillator, tabulated };

// A named material as written in the config; metals are resolved into a
// Drude-type or plasma-type model per approach.
struct MaterialSpec {
  std::string name = "vacuum";
  MaterialKind kind = MaterialKind::vacuum;
  double plasma_frequency = 0.0;  // rad/s
  std::optional<RelaxationLaw> relaxation;
  std::vector<OscillatorTerm> terms;
  std::shared_ptr<const OpticalTable> table;
  bool subtract_drude = true;  // plasma tail of tabulated data

  bool is_metal() const;
};

// Vacuum, drude (9 eV, 0.035 eV, 165 K) under the names "gold" and "au",
// and the two-oscillator "sapphire".
std::map<std::string, MaterialSpec> builtin_materials();

DielectricModel build_model(const MaterialSpec& spec, Approach approach);

struct RunConfig {
  Command command = Command::point;
  std::map<std::string, MaterialSpec> materials;  // builtins plus [material.NAME] entries
  MaterialSpec film;
  MaterialSpec plate_left;
  MaterialSpec plate_right;
  double thickness = 100e-9;  // m
  double temperature = 300.0;  // K
  ApproachChoice approach = ApproachChoice::both;
  std::optional<Grid> grid;  // nm for thickness sweeps, K for temperature sweeps
  std::string output;        // empty: stdout
  Format format = Format::csv;
  double tol = 1e-6;
  bool log_space = false;
  int threads = 0;

  RunConfig();
  void validate() const;
  std::vector<Approach> approaches() const;
  LayeredConfig layered(Approach approach, double a, double T) const;
};

RunConfig parse_config(std::istream& in, const std::string& source = "<config>",
                       const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

// Looks up a material by name (builtins included) from a parsed config's table.
const MaterialSpec& find_material(const std::map<std::string, MaterialSpec>& table, const std::string& name);

}  // namespace casimir::run
