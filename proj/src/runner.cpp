#include "casimir/runner.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <ostream>

#include "casimir/asymptotics.hpp"
#include "casimir/constants.hpp"
#include "casimir/fixtures.hpp"
#include "casimir/parallel.hpp"
#include "casimir/specfun.hpp"

namespace casimir::run {

namespace {

constexpr const char* kVersion = "0.1.0";

Cell real_or_empty(double v) {
  if (!std::isfinite(v)) return std::monostate{};
  return v;
}

Cell ratio_cell(const std::optional<double>& num, const std::optional<double>& den) {
  if (!num || !den || *den == 0.0) return std::monostate{};
  return real_or_empty(*num / *den);
}

std::optional<double> value_of(const std::optional<FreeEnergyResult>& r) {
  if (!r || r->underflow) return std::nullopt;
  return r->value;
}

std::optional<double> value_of(const std::optional<PressureResult>& r) {
  if (!r || r->underflow) return std::nullopt;
  return r->value;
}

Cell opt_cell(const std::optional<double>& v) { return v ? real_or_empty(*v) : Cell{}; }

// Ratio of free energies through their log magnitudes, so the plasma
// underflow regime still yields a ratio when it is representable.
Cell free_energy_ratio(const PointRecord& r) {
  if (!r.f_drude || !r.f_plasma) return std::monostate{};
  const auto& d = r.f_drude->log_magnitude;
  const auto& p = r.f_plasma->log_magnitude;
  if (d.is_zero() || p.is_zero()) return std::monostate{};
  const double log_ratio = d.log10_abs() - p.log10_abs();
  return real_or_empty(d.sign() * p.sign() * std::pow(10.0, log_ratio));
}

std::string models_echo(const RunConfig& cfg) {
  std::string out;
  for (auto a : cfg.approaches()) {
    if (!out.empty()) out += "|";
    try {
      out += describe(build_model(cfg.film, a));
    } catch (const std::exception&) {
      out += "invalid";
    }
  }
  return out;
}

std::vector<std::string> echo_columns() { return {"film", "plate_left", "plate_right", "omega_p_eV", "gamma_eV", "models"}; }

void append_echo(std::vector<Cell>& row, const RunConfig& cfg, double T) {
  row.emplace_back(cfg.film.name);
  row.emplace_back(cfg.plate_left.name);
  row.emplace_back(cfg.plate_right.name);
  if (cfg.film.is_metal()) {
    row.emplace_back(constants::to_ev(cfg.film.plasma_frequency));
  } else {
    row.emplace_back(std::monostate{});
  }
  if (cfg.film.relaxation) {
    row.emplace_back(constants::to_ev(relaxation(*cfg.film.relaxation, T)));
  } else {
    row.emplace_back(std::monostate{});
  }
  row.emplace_back(models_echo(cfg));
}

Cell l_max_cell(const std::optional<FreeEnergyResult>& r) {
  if (!r) return std::monostate{};
  return static_cast<long long>(r->l_max_used);
}

std::vector<PointRecord> evaluate_grid(const RunConfig& cfg, const std::vector<std::pair<double, double>>& points) {
  std::vector<PointRecord> out(points.size());
  RunConfig inner = cfg;
  if (points.size() > 1) inner.threads = 1;
  parallel_for(points.size(), cfg.threads,
               [&](std::size_t i) { out[i] = evaluate_point(inner, points[i].first, points[i].second); });
  return out;
}

Table thickness_table(const RunConfig& cfg, const std::vector<double>& thicknesses_nm) {
  Table t;
  t.columns = {"a_nm",         "F_drude_J_m2", "F_plasma_J_m2", "ratio_F",    "P_drude_Pa", "P_plasma_Pa",
               "ratio_P",      "log10_abs_F_plasma", "l_max_drude", "l_max_plasma", "error", "T_K"};
  for (auto& c : echo_columns()) t.columns.push_back(c);
  std::vector<std::pair<double, double>> pts;
  for (double a : thicknesses_nm) pts.emplace_back(a * constants::nm, cfg.temperature);
  const auto records = evaluate_grid(cfg, pts);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    std::vector<Cell> row;
    row.emplace_back(thicknesses_nm[i]);
    row.push_back(opt_cell(value_of(r.f_drude)));
    row.push_back(r.f_plasma ? Cell{r.f_plasma->value} : Cell{});
    row.push_back(free_energy_ratio(r));
    row.push_back(opt_cell(value_of(r.p_drude)));
    row.push_back(opt_cell(value_of(r.p_plasma)));
    row.push_back(ratio_cell(value_of(r.p_drude), value_of(r.p_plasma)));
    if (r.f_plasma && !r.f_plasma->log_magnitude.is_zero()) {
      row.emplace_back(r.f_plasma->log_magnitude.log10_abs());
    } else {
      row.emplace_back(std::monostate{});
    }
    row.push_back(l_max_cell(r.f_drude));
    row.push_back(l_max_cell(r.f_plasma));
    row.emplace_back(r.error);
    row.emplace_back(r.T);
    append_echo(row, cfg, r.T);
    t.any_error = t.any_error || !r.error.empty();
    t.rows.push_back(std::move(row));
  }
  return t;
}

struct OracleRow {
  std::string quantity;
  std::optional<double> drude;
  std::optional<double> plasma;
  std::optional<double> oracle;
  double tolerance = 0.0;
  bool upper_bound = false;  // engine value must not exceed the oracle
};

std::vector<Cell> oracle_cells(const OracleRow& o) {
  std::vector<Cell> row{o.quantity, opt_cell(o.drude), opt_cell(o.plasma), Cell{}};
  const auto engine = o.drude ? o.drude : o.plasma;
  if (!o.oracle || !engine) {
    row.insert(row.end(), {Cell{}, Cell{}, Cell{std::string("n/a")}});
    return row;
  }
  row.push_back(real_or_empty(*o.oracle));
  const double rel = *o.oracle != 0.0 ? std::fabs(*engine / *o.oracle - 1.0) : std::fabs(*engine);
  row.push_back(real_or_empty(rel));
  const bool pass = o.upper_bound ? *engine <= *o.oracle : rel <= o.tolerance;
  row.emplace_back(std::string(pass ? "pass" : "fail"));
  return row;
}

}  // namespace

PointRecord evaluate_point(const RunConfig& cfg, double a, double T) {
  PointRecord r;
  r.a = a;
  r.T = T;
  const EngineOptions opt{cfg.tol, cfg.log_space, cfg.threads};
  for (auto approach : cfg.approaches()) {
    const bool drude = approach == Approach::drude;
    try {
      const LayeredConfig lc = cfg.layered(approach, a, T);
      auto f = free_energy(lc, opt);
      auto p = pressure(lc, opt);
      (drude ? r.f_drude : r.f_plasma) = f;
      (drude ? r.p_drude : r.p_plasma) = p;
    } catch (const std::exception& e) {
      if (!r.error.empty()) r.error += "; ";
      r.error += to_string(approach) + ": " + e.what();
    }
  }
  return r;
}

Table sweep_thickness(const RunConfig& cfg) {
  if (!cfg.grid) throw ConfigError("sweep-thickness needs a grid");
  return thickness_table(cfg, cfg.grid->points());
}

Table point_table(const RunConfig& cfg) { return thickness_table(cfg, {cfg.thickness / constants::nm}); }

Table sweep_temperature(const RunConfig& cfg) {
  if (!cfg.grid) throw ConfigError("sweep-temperature needs a grid");
  Table t;
  t.columns = {"T_K",       "F_drude_J_m2",       "F_plasma_J_m2", "P_drude_Pa",   "P_plasma_Pa", "ratio_F",
               "ratio_P",   "log10_abs_F_plasma", "l_max_drude",   "l_max_plasma", "error",       "a_nm"};
  for (auto& c : echo_columns()) t.columns.push_back(c);
  const auto temps = cfg.grid->points();
  std::vector<std::pair<double, double>> pts;
  for (double T : temps) pts.emplace_back(cfg.thickness, T);
  const auto records = evaluate_grid(cfg, pts);
  for (const auto& r : records) {
    std::vector<Cell> row;
    row.emplace_back(r.T);
    row.push_back(opt_cell(value_of(r.f_drude)));
    row.push_back(r.f_plasma ? Cell{r.f_plasma->value} : Cell{});
    row.push_back(opt_cell(value_of(r.p_drude)));
    row.push_back(opt_cell(value_of(r.p_plasma)));
    row.push_back(free_energy_ratio(r));
    row.push_back(ratio_cell(value_of(r.p_drude), value_of(r.p_plasma)));
    if (r.f_plasma && !r.f_plasma->log_magnitude.is_zero()) {
      row.emplace_back(r.f_plasma->log_magnitude.log10_abs());
    } else {
      row.emplace_back(std::monostate{});
    }
    row.push_back(l_max_cell(r.f_drude));
    row.push_back(l_max_cell(r.f_plasma));
    row.emplace_back(r.error);
    row.emplace_back(r.a / constants::nm);
    append_echo(row, cfg, r.T);
    t.any_error = t.any_error || !r.error.empty();
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table compare(const RunConfig& cfg) {
  RunConfig both = cfg;
  both.approach = ApproachChoice::both;
  const PointRecord r = evaluate_point(both, cfg.thickness, cfg.temperature);
  Table t;
  t.columns = {"quantity", "drude", "plasma", "ratio", "oracle", "rel_diff", "flag"};
  t.any_error = !r.error.empty();

  auto pair_row = [&](const std::string& name, std::optional<double> d, std::optional<double> p) {
    t.rows.push_back({name, opt_cell(d), opt_cell(p), ratio_cell(d, p), Cell{}, Cell{}, Cell{}});
  };
  auto field = [](const auto& res, auto member) -> std::optional<double> {
    if (!res) return std::nullopt;
    return (*res).*member;
  };
  pair_row("F_J_m2", value_of(r.f_drude), value_of(r.f_plasma));
  pair_row("P_Pa", value_of(r.p_drude), value_of(r.p_plasma));
  pair_row("F_l0_tm_J_m2", field(r.f_drude, &FreeEnergyResult::l0_tm), field(r.f_plasma, &FreeEnergyResult::l0_tm));
  pair_row("F_l0_te_J_m2", field(r.f_drude, &FreeEnergyResult::l0_te), field(r.f_plasma, &FreeEnergyResult::l0_te));
  pair_row("F_tail_J_m2", field(r.f_drude, &FreeEnergyResult::tail_l_ge_1),
           field(r.f_plasma, &FreeEnergyResult::tail_l_ge_1));
  pair_row("P_l0_Pa", field(r.p_drude, &PressureResult::l0), field(r.p_plasma, &PressureResult::l0));
  pair_row("P_tail_Pa", field(r.p_drude, &PressureResult::tail_l_ge_1),
           field(r.p_plasma, &PressureResult::tail_l_ge_1));
  {
    std::vector<Cell> row{std::string("l_max"), Cell{}, Cell{}, Cell{}, Cell{}, Cell{}, Cell{}};
    if (r.f_drude) row[1] = static_cast<long long>(r.f_drude->l_max_used);
    if (r.f_plasma) row[2] = static_cast<long long>(r.f_plasma->l_max_used);
    t.rows.push_back(std::move(row));
  }

  const double a = cfg.thickness;
  const double T = cfg.temperature;
  asymptotics::AsymptoticInput in{a, T, std::nullopt, std::nullopt};
  if (cfg.film.is_metal()) {
    in.omega_p = cfg.film.plasma_frequency;
    if (cfg.film.relaxation) in.gamma = relaxation(*cfg.film.relaxation, T);
  }
  const double w = in.omega_p ? in.omega_p_tilde() : 0.0;
  const bool plates_dielectric = !cfg.plate_left.is_metal() && !cfg.plate_right.is_metal();
  auto guard = [](auto&& fn) -> std::optional<double> {
    try {
      return fn();
    } catch (const std::exception&) {
      return std::nullopt;
    }
  };

  std::vector<OracleRow> oracles;
  if (r.f_drude && cfg.film.is_metal()) {
    oracles.push_back({"F_l0_tm vs classical", r.f_drude->l0_tm, std::nullopt,
                       asymptotics::classical_drude_free_energy(a, T), 1e-6});
    std::optional<double> bound;
    if (in.gamma && w >= asymptotics::kExpansionMinOmegaTilde) {
      bound = guard([&] { return asymptotics::drude_tail_bound(in) / (zeta3() / 2.0); });
    }
    const double fraction = r.f_drude->l0_tm != 0.0 ? std::fabs(r.f_drude->tail_l_ge_1 / r.f_drude->l0_tm) : 0.0;
    oracles.push_back({"tail/l0 vs bound/0.601", fraction, std::nullopt, bound, 0.0, true});
  }
  if (r.f_plasma && cfg.film.is_metal() && !r.f_plasma->underflow) {
    const auto& f = *r.f_plasma;
    const bool exact_ok = plates_dielectric;
    oracles.push_back({"F_l0_tm vs polylog form", std::nullopt, f.l0_tm,
                       exact_ok ? guard([&] { return asymptotics::plasma_l0_tm(in); }) : std::nullopt, 1e-6});
    oracles.push_back({"F_l0_te vs quadrature form", std::nullopt, f.l0_te,
                       exact_ok ? guard([&] { return asymptotics::plasma_l0_te(in); }) : std::nullopt, 1e-6});
    oracles.push_back({"F_l0 vs leading l0", std::nullopt, f.l0_tm + f.l0_te,
                       exact_ok ? guard([&] { return asymptotics::plasma_l0_combined(in); }) : std::nullopt, 0.3});
    if (r.p_plasma) {
      oracles.push_back({"P_l0 vs leading l0 pressure", std::nullopt, r.p_plasma->l0,
                         exact_ok ? guard([&] { return asymptotics::plasma_l0_pressure(in); }) : std::nullopt,
                         0.3});
    }
    oracles.push_back({"F_tail vs l>=1 asymptote", std::nullopt, f.tail_l_ge_1,
                       guard([&] { return asymptotics::plasma_tail_l_ge_1(in); }), 0.05});
  }
  for (const auto& o : oracles) t.rows.push_back(oracle_cells(o));
  if (!r.error.empty()) t.rows.push_back({std::string("error"), Cell{}, Cell{}, Cell{}, Cell{}, Cell{}, r.error});
  return t;
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string cell_text(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, std::monostate>) {
          return {};
        } else if constexpr (std::is_same_v<V, double>) {
          return format_real(v);
        } else if constexpr (std::is_same_v<V, long long>) {
          return std::to_string(v);
        } else {
          return csv_escape(v);
        }
      },
      c);
}

nlohmann::json cell_json(const Cell& c) {
  return std::visit(
      [](const auto& v) -> nlohmann::json {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, std::monostate>) {
          return nullptr;
        } else if constexpr (std::is_same_v<V, double>) {
          if (!std::isfinite(v)) return nullptr;
          return v;
        } else {
          return v;
        }
      },
      c);
}

nlohmann::json meta(const RunConfig& cfg) {
  nlohmann::json m;
  m["version"] = kVersion;
  m["command"] = to_string(cfg.command);
  m["approach"] = to_string(cfg.approach);
  m["tol"] = cfg.tol;
  m["log_space"] = cfg.log_space;
  m["thickness_nm"] = cfg.thickness / constants::nm;
  m["temperature_K"] = cfg.temperature;
  m["film"] = cfg.film.name;
  m["plate_left"] = cfg.plate_left.name;
  m["plate_right"] = cfg.plate_right.name;
  m["models"] = models_echo(cfg);
  if (cfg.grid) {
    m["grid"] = {{"min", cfg.grid->min},
                 {"max", cfg.grid->max},
                 {"count", cfg.grid->count},
                 {"scale", cfg.grid->log ? "log" : "linear"}};
  }
  m["constants"] = {{"hbar_J_s", constants::hbar},
                    {"k_B_J_K", constants::boltzmann},
                    {"c_m_s", constants::speed_of_light},
                    {"eV_rad_s", constants::ev_to_rad_per_s}};
  return m;
}

Table fixtures_table(const std::vector<FixtureOutcome>& results) {
  Table t;
  t.columns = {"name", "measured", "expected", "tolerance", "check", "pass", "model", "error"};
  for (const auto& f : results) {
    t.rows.push_back({f.name, real_or_empty(f.measured), f.expected, f.tolerance, to_string(f.check),
                      std::string(f.pass ? "pass" : "fail"), f.model, f.error});
  }
  return t;
}

}  // namespace

void write_csv(const Table& table, std::ostream& out) {
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << cell_text(row[i]);
    out << '\n';
  }
}

void write_json(const Table& table, const RunConfig& cfg, std::ostream& out) {
  nlohmann::json doc;
  doc["meta"] = meta(cfg);
  doc["columns"] = table.columns;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json obj = nlohmann::json::object();
    for (std::size_t i = 0; i < row.size() && i < table.columns.size(); ++i) obj[table.columns[i]] = cell_json(row[i]);
    rows.push_back(std::move(obj));
  }
  doc["rows"] = std::move(rows);
  out << doc.dump(2) << '\n';
}

int execute(const RunConfig& cfg, std::ostream& out) {
  Table table;
  int status = 0;
  switch (cfg.command) {
    case Command::sweep_thickness: table = sweep_thickness(cfg); break;
    case Command::sweep_temperature: table = sweep_temperature(cfg); break;
    case Command::point: table = point_table(cfg); break;
    case Command::compare: table = compare(cfg); break;
    case Command::fixtures: {
      const auto results = run_fixtures(cfg.threads);
      table = fixtures_table(results);
      for (const auto& f : results) {
        if (!f.pass) status = 3;
      }
      break;
    }
  }
  if (status == 0 && table.any_error) status = 2;
  if (cfg.format == Format::json) {
    write_json(table, cfg, out);
  } else {
    write_csv(table, out);
  }
  return status;
}

}  // namespace casimir::run
