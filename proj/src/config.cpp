#include "casimir/config.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "casimir/constants.hpp"

namespace casimir::run {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

double parse_number(const std::string& text) {
  const std::string t = trim(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw ConfigError("expected a number, got '" + text + "'");
  }
  if (used != t.size() || !std::isfinite(v)) throw ConfigError("expected a number, got '" + text + "'");
  return v;
}

// Location of `key = ...` lines per section, for diagnostics.
class LineIndex {
 public:
  explicit LineIndex(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::string section;
    int n = 0;
    while (std::getline(in, line)) {
      ++n;
      const std::string t = trim(line);
      if (t.empty() || t[0] == '#' || t[0] == ';') continue;
      if (t.front() == '[') {
        section = trim(t.substr(1, t.find(']') - 1));
        lines_[{section, ""}] = n;
        continue;
      }
      const auto eq = t.find('=');
      if (eq != std::string::npos) lines_.emplace(std::make_pair(section, trim(t.substr(0, eq))), n);
    }
  }

  int find(const std::string& section, const std::string& key) const {
    auto it = lines_.find({section, key});
    if (it == lines_.end()) it = lines_.find({section, ""});
    return it == lines_.end() ? 0 : it->second;
  }

 private:
  std::map<std::pair<std::string, std::string>, int> lines_;
};

struct Entry {
  std::string section;
  std::string key;
  std::vector<std::string> values;
  int line = 0;
};

class Diagnostics {
 public:
  explicit Diagnostics(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const Entry& e, const std::string& message) const {
    char head[64];
    std::snprintf(head, sizeof head, ":%d: ", e.line);
    throw ConfigError(source_ + head + "[" + e.section + "] " + e.key + ": " + message);
  }
  [[noreturn]] void fail(const std::string& section, const std::string& message) const {
    throw ConfigError(source_ + ": [" + section + "] " + message);
  }

  double number(const Entry& e) const {
    if (e.values.size() != 1) fail(e, "expected a single value");
    try {
      return parse_number(e.values[0]);
    } catch (const ConfigError& err) {
      fail(e, err.what());
    }
  }

  std::vector<double> numbers(const Entry& e) const {
    std::vector<double> out;
    for (const auto& v : e.values) {
      try {
        out.push_back(parse_number(v));
      } catch (const ConfigError& err) {
        fail(e, err.what());
      }
    }
    return out;
  }

  std::string text(const Entry& e) const {
    if (e.values.size() != 1) fail(e, "expected a single value");
    return e.values[0];
  }

  bool boolean(const Entry& e) const {
    const std::string v = lower(text(e));
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    fail(e, "expected true or false");
  }

 private:
  std::string source_;
};

MaterialKind parse_kind(const std::string& t) {
  const std::string v = lower(t);
  if (v == "vacuum") return MaterialKind::vacuum;
  if (v == "drude") return MaterialKind::drude;
  if (v == "plasma") return MaterialKind::plasma;
  if (v == "oscillator") return MaterialKind::oscillator;
  if (v == "tabulated") return MaterialKind::tabulated;
  throw ConfigError("unknown material type '" + t + "' (vacuum|drude|plasma|oscillator|tabulated)");
}

MaterialSpec parse_material(const std::string& name, const std::vector<Entry>& entries, const Diagnostics& d,
                            const std::filesystem::path& base_dir) {
  const std::string section = "material." + name;
  MaterialSpec m;
  m.name = name;
  std::optional<MaterialKind> kind;
  std::optional<double> omega_p_ev, gamma_ev;
  double debye = 165.0;
  double helium = 4.2;
  std::vector<double> strengths, resonances;
  std::optional<std::string> data_file;
  for (const auto& e : entries) {
    try {
      if (e.key == "type") {
        kind = parse_kind(d.text(e));
      } else if (e.key == "omega_p_eV") {
        omega_p_ev = d.number(e);
      } else if (e.key == "gamma_eV") {
        gamma_ev = d.number(e);
      } else if (e.key == "debye_K") {
        debye = d.number(e);
      } else if (e.key == "helium_K") {
        helium = d.number(e);
      } else if (e.key == "strengths") {
        strengths = d.numbers(e);
      } else if (e.key == "resonances_eV") {
        resonances = d.numbers(e);
        for (double& r : resonances) r = constants::ev(r);
      } else if (e.key == "resonances_rad_s") {
        resonances = d.numbers(e);
      } else if (e.key == "data_file") {
        data_file = d.text(e);
      } else if (e.key == "subtract_drude") {
        m.subtract_drude = d.boolean(e);
      } else {
        d.fail(e, "unknown key");
      }
    } catch (const ConfigError& err) {
      if (std::string(err.what()).find("[") != std::string::npos) throw;
      d.fail(e, err.what());
    }
  }
  if (!kind) d.fail(section, "missing key 'type'");
  m.kind = *kind;
  if (omega_p_ev) {
    if (!(*omega_p_ev > 0.0)) d.fail(section, "omega_p_eV must be > 0");
    m.plasma_frequency = constants::ev(*omega_p_ev);
  }
  if (gamma_ev) {
    if (!(*gamma_ev > 0.0)) d.fail(section, "gamma_eV must be > 0");
    m.relaxation = RelaxationLaw{constants::ev(*gamma_ev), debye, helium, 300.0};
    if (!(debye > 0.0) || !(helium > 0.0)) d.fail(section, "debye_K and helium_K must be > 0");
  }
  switch (m.kind) {
    case MaterialKind::vacuum:
      break;
    case MaterialKind::drude:
      if (!omega_p_ev) d.fail(section, "drude material needs omega_p_eV");
      if (!gamma_ev) d.fail(section, "drude material needs gamma_eV");
      break;
    case MaterialKind::plasma:
      if (!omega_p_ev) d.fail(section, "plasma material needs omega_p_eV");
      break;
    case MaterialKind::oscillator:
      if (strengths.empty() || strengths.size() != resonances.size()) {
        d.fail(section, "oscillator needs equally long 'strengths' and 'resonances_eV'/'resonances_rad_s'");
      }
      for (std::size_t i = 0; i < strengths.size(); ++i) {
        if (!(strengths[i] >= 0.0) || !(resonances[i] > 0.0)) {
          d.fail(section, "oscillator strengths must be >= 0 and resonances > 0");
        }
        m.terms.push_back({strengths[i], resonances[i]});
      }
      break;
    case MaterialKind::tabulated: {
      if (!data_file) d.fail(section, "tabulated material needs data_file");
      if (!omega_p_ev) d.fail(section, "tabulated material needs omega_p_eV for the extrapolation");
      std::filesystem::path p(*data_file);
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      try {
        m.table = std::make_shared<const OpticalTable>(load_optical_table(p));
      } catch (const std::exception& err) {
        d.fail(section, std::string("data_file: ") + err.what());
      }
      break;
    }
  }
  return m;
}

}  // namespace

Command parse_command(const std::string& text) {
  const std::string v = lower(text);
  if (v == "sweep-thickness") return Command::sweep_thickness;
  if (v == "sweep-temperature") return Command::sweep_temperature;
  if (v == "point") return Command::point;
  if (v == "compare") return Command::compare;
  if (v == "fixtures") return Command::fixtures;
  throw ConfigError("unknown command '" + text + "' (sweep-thickness|sweep-temperature|point|compare|fixtures)");
}

ApproachChoice parse_approach(const std::string& text) {
  const std::string v = lower(text);
  if (v == "drude") return ApproachChoice::drude;
  if (v == "plasma") return ApproachChoice::plasma;
  if (v == "both") return ApproachChoice::both;
  throw ConfigError("unknown approach '" + text + "' (drude|plasma|both)");
}

Format parse_format(const std::string& text) {
  const std::string v = lower(text);
  if (v == "csv") return Format::csv;
  if (v == "json") return Format::json;
  throw ConfigError("unknown format '" + text + "' (csv|json)");
}

std::string to_string(Command c) {
  switch (c) {
    case Command::sweep_thickness: return "sweep-thickness";
    case Command::sweep_temperature: return "sweep-temperature";
    case Command::point: return "point";
    case Command::compare: return "compare";
    case Command::fixtures: return "fixtures";
  }
  return "?";
}

std::string to_string(ApproachChoice a) {
  switch (a) {
    case ApproachChoice::drude: return "drude";
    case ApproachChoice::plasma: return "plasma";
    case ApproachChoice::both: return "both";
  }
  return "?";
}

std::string to_string(Approach a) { return a == Approach::drude ? "drude" : "plasma"; }

std::vector<double> Grid::points() const {
  validate();
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / (count - 1);
    out[static_cast<std::size_t>(i)] =
        log ? std::exp(std::log(min) + t * (std::log(max) - std::log(min))) : min + t * (max - min);
  }
  out.front() = min;
  out.back() = max;
  return out;
}

void Grid::validate() const {
  if (!(min < max)) throw ConfigError("grid: min must be < max");
  if (count < 2) throw ConfigError("grid: count must be >= 2");
  if (log && !(min > 0.0)) throw ConfigError("grid: log scale needs min > 0");
}

Grid parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(trim(item));
  if (parts.size() != 3 && parts.size() != 4) throw ConfigError("grid: expected min,max,count[,log|linear]");
  Grid g;
  g.min = parse_number(parts[0]);
  g.max = parse_number(parts[1]);
  const double count = parse_number(parts[2]);
  if (count != std::floor(count) || count > 1e6) throw ConfigError("grid: count must be an integer");
  g.count = static_cast<int>(count);
  if (parts.size() == 4) {
    const std::string s = lower(parts[3]);
    if (s == "log") {
      g.log = true;
    } else if (s != "linear") {
      throw ConfigError("grid: scale must be log or linear");
    }
  }
  g.validate();
  return g;
}

bool MaterialSpec::is_metal() const {
  return kind == MaterialKind::drude || kind == MaterialKind::plasma || kind == MaterialKind::tabulated;
}

std::map<std::string, MaterialSpec> builtin_materials() {
  std::map<std::string, MaterialSpec> out;
  out["vacuum"] = MaterialSpec{};

  const DrudeModel au = gold_drude();
  MaterialSpec gold;
  gold.name = "gold";
  gold.kind = MaterialKind::drude;
  gold.plasma_frequency = au.plasma_frequency;
  gold.relaxation = au.relaxation;
  out["gold"] = gold;
  gold.name = "au";
  out["au"] = gold;

  MaterialSpec sap;
  sap.name = "sapphire";
  sap.kind = MaterialKind::oscillator;
  sap.terms = sapphire().terms;
  out["sapphire"] = sap;
  return out;
}

DielectricModel build_model(const MaterialSpec& m, Approach approach) {
  switch (m.kind) {
    case MaterialKind::vacuum:
      return VacuumModel{};
    case MaterialKind::oscillator:
      return OscillatorModel{m.terms};
    case MaterialKind::drude:
    case MaterialKind::plasma:
      if (approach == Approach::plasma) return PlasmaModel{m.plasma_frequency};
      if (!m.relaxation) throw ConfigError("material '" + m.name + "': the Drude approach needs gamma_eV");
      return DrudeModel{m.plasma_frequency, *m.relaxation};
    case MaterialKind::tabulated: {
      if (!m.table) throw ConfigError("material '" + m.name + "': no optical table loaded");
      if (approach == Approach::drude) {
        if (!m.relaxation) throw ConfigError("material '" + m.name + "': the Drude tail needs gamma_eV");
        return TabulatedModel(m.table, DrudeTail{m.plasma_frequency, *m.relaxation});
      }
      std::optional<RelaxationLaw> subtract;
      if (m.subtract_drude) subtract = m.relaxation;
      return TabulatedModel(m.table, PlasmaTail{m.plasma_frequency, subtract});
    }
  }
  throw ConfigError("unknown material kind");
}

const MaterialSpec& find_material(const std::map<std::string, MaterialSpec>& table, const std::string& name) {
  auto it = table.find(name);
  if (it == table.end()) it = table.find(lower(name));
  if (it == table.end()) throw ConfigError("unknown material '" + name + "'");
  return it->second;
}

RunConfig::RunConfig() : materials(builtin_materials()) {
  film = materials.at("gold");
  plate_left = materials.at("vacuum");
  plate_right = plate_left;
}

void RunConfig::validate() const {
  if (!(thickness > 0.0) || !std::isfinite(thickness)) throw ConfigError("thickness must be > 0");
  if (!(temperature > 0.0) || !std::isfinite(temperature)) throw ConfigError("temperature must be > 0");
  if (!(tol > 0.0 && tol <= 1e-2)) throw ConfigError("tol must lie in (0, 1e-2]");
  if (threads < 0) throw ConfigError("threads must be >= 0");
  if (command == Command::sweep_thickness || command == Command::sweep_temperature) {
    if (!grid) throw ConfigError(to_string(command) + " needs a grid");
    grid->validate();
    if (!(grid->min > 0.0)) throw ConfigError("grid values must be > 0");
  }
  for (auto a : approaches()) {
    for (const auto* m : {&film, &plate_left, &plate_right}) (void)build_model(*m, a);
  }
}

std::vector<Approach> RunConfig::approaches() const {
  switch (approach) {
    case ApproachChoice::drude: return {Approach::drude};
    case ApproachChoice::plasma: return {Approach::plasma};
    case ApproachChoice::both: break;
  }
  return {Approach::drude, Approach::plasma};
}

LayeredConfig RunConfig::layered(Approach approach_, double a, double T) const {
  return {build_model(film, approach_), build_model(plate_left, approach_), build_model(plate_right, approach_), a,
          T};
}

RunConfig parse_config(std::istream& in, const std::string& source, const std::filesystem::path& base_dir) {
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  const LineIndex lines(text);
  const Diagnostics d(source);

  std::vector<CLI::ConfigItem> items;
  try {
    std::istringstream body(text);
    items = CLI::ConfigTOML().from_config(body);
  } catch (const CLI::Error& err) {
    throw ConfigError(source + ": " + err.what());
  }

  std::map<std::string, std::vector<Entry>> material_entries;
  std::vector<Entry> configuration, run;
  for (const auto& it : items) {
    if (it.name == "++" || it.name == "--") continue;
    Entry e;
    for (std::size_t i = 0; i < it.parents.size(); ++i) e.section += (i ? "." : "") + it.parents[i];
    e.key = it.name;
    e.values = it.inputs;
    e.line = lines.find(e.section, e.key);
    if (it.parents.size() == 2 && it.parents[0] == "material") {
      material_entries[it.parents[1]].push_back(std::move(e));
    } else if (e.section == "configuration") {
      configuration.push_back(std::move(e));
    } else if (e.section == "run" || e.section.empty()) {
      run.push_back(std::move(e));
    } else {
      d.fail(e, "unknown section");
    }
  }

  RunConfig cfg;
  for (const auto& [name, entries] : material_entries) {
    cfg.materials[name] = parse_material(name, entries, d, base_dir);
  }

  auto material = [&](const Entry& e) -> const MaterialSpec& {
    try {
      return find_material(cfg.materials, d.text(e));
    } catch (const ConfigError& err) {
      d.fail(e, err.what());
    }
  };
  auto guarded = [&](const Entry& e, auto&& fn) {
    try {
      fn();
    } catch (const ConfigError& err) {
      if (std::string(err.what()).rfind(source, 0) == 0) throw;
      d.fail(e, err.what());
    }
  };

  for (const auto& e : configuration) {
    guarded(e, [&] {
      if (e.key == "film") {
        cfg.film = material(e);
      } else if (e.key == "plates") {
        cfg.plate_left = material(e);
        cfg.plate_right = cfg.plate_left;
      } else if (e.key == "plate_left") {
        cfg.plate_left = material(e);
      } else if (e.key == "plate_right") {
        cfg.plate_right = material(e);
      } else if (e.key == "thickness_nm") {
        cfg.thickness = d.number(e) * constants::nm;
        if (!(cfg.thickness > 0.0)) d.fail(e, "must be > 0");
      } else if (e.key == "temperature_K") {
        cfg.temperature = d.number(e);
        if (!(cfg.temperature > 0.0)) d.fail(e, "must be > 0");
      } else {
        d.fail(e, "unknown key");
      }
    });
  }

  for (const auto& e : run) {
    guarded(e, [&] {
      if (e.key == "command") {
        cfg.command = parse_command(d.text(e));
      } else if (e.key == "approach") {
        cfg.approach = parse_approach(d.text(e));
      } else if (e.key == "grid") {
        cfg.grid = parse_grid(d.text(e));
      } else if (e.key == "out") {
        cfg.output = d.text(e);
      } else if (e.key == "format") {
        cfg.format = parse_format(d.text(e));
      } else if (e.key == "tol") {
        cfg.tol = d.number(e);
        if (!(cfg.tol > 0.0 && cfg.tol <= 1e-2)) d.fail(e, "must lie in (0, 1e-2]");
      } else if (e.key == "log_space") {
        cfg.log_space = d.boolean(e);
      } else if (e.key == "threads") {
        const double t = d.number(e);
        if (t < 0 || t != std::floor(t)) d.fail(e, "must be a non-negative integer");
        cfg.threads = static_cast<int>(t);
      } else {
        d.fail(e, "unknown key");
      }
    });
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  return parse_config(in, path.string(), path.parent_path());
}

}  // namespace casimir::run
