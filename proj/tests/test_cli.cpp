#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "casimir/config.hpp"
#include "casimir/constants.hpp"
#include "casimir/fixtures.hpp"
#include "casimir/runner.hpp"
#include "support.hpp"

using namespace casimir;
using namespace casimir::run;
using casimir::testing::rel;

namespace {

namespace fs = std::filesystem;

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / ("casimir_cli_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

RunConfig parse(const std::string& text, const fs::path& base = {}) {
  std::istringstream in(text);
  return parse_config(in, "test.toml", base);
}

std::string config_error(const std::string& text, const fs::path& base = {}) {
  try {
    parse(text, base).validate();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

std::string csv(const Table& t) {
  std::ostringstream out;
  write_csv(t, out);
  return out.str();
}

std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

int run_cli(const std::string& args, const fs::path& out_file) {
  const std::string cmd = std::string(CASIMIR_CLI_PATH) + " " + args + " > " + out_file.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

const char* const kSweepConfig = R"(# Au film between sapphire plates
[material.au9]
type = "drude"
omega_p_eV = 9.0
gamma_eV = 0.035
debye_K = 165

[configuration]
film = "au9"
plates = "sapphire"
temperature_K = 300

[run]
command = "sweep-thickness"
approach = "both"
grid = "50,200,3,log"
tol = 1e-6
threads = 1
)";

}  // namespace

TEST_CASE("grid parsing") {
  const Grid g = parse_grid("50,200,3,log");
  CHECK(g.log);
  REQUIRE(g.points().size() == 3);
  CHECK(rel(g.points()[1], 100.0) < 1e-12);
  CHECK(g.points().front() == 50.0);
  CHECK(g.points().back() == 200.0);
  const Grid lin = parse_grid("1, 300, 4, linear");
  CHECK_FALSE(lin.log);
  CHECK(lin.points()[1] == doctest::Approx(100.666666666667));
  CHECK_FALSE(parse_grid("1,2,2").log);
  CHECK_THROWS_AS(parse_grid("2,1,3"), ConfigError);
  CHECK_THROWS_AS(parse_grid("1,2,1"), ConfigError);
  CHECK_THROWS_AS(parse_grid("1,2"), ConfigError);
  CHECK_THROWS_AS(parse_grid("1,2,3,cubic"), ConfigError);
  CHECK_THROWS_AS(parse_grid("0,2,3,log"), ConfigError);
  CHECK_THROWS_AS(parse_grid("1,2,2.5"), ConfigError);
  CHECK_THROWS_AS(parse_grid("a,2,3"), ConfigError);
}

TEST_CASE("enum parsing") {
  CHECK(parse_command("sweep-thickness") == Command::sweep_thickness);
  CHECK(parse_command("fixtures") == Command::fixtures);
  CHECK(parse_approach("plasma") == ApproachChoice::plasma);
  CHECK(parse_format("json") == Format::json);
  CHECK_THROWS_AS(parse_command("sweep"), ConfigError);
  CHECK_THROWS_AS(parse_approach("hydrodynamic"), ConfigError);
  CHECK_THROWS_AS(parse_format("xml"), ConfigError);
  CHECK(to_string(Command::sweep_temperature) == "sweep-temperature");
}

TEST_CASE("config file with materials, configuration and run sections") {
  const RunConfig cfg = parse(kSweepConfig);
  CHECK(cfg.command == Command::sweep_thickness);
  CHECK(cfg.film.name == "au9");
  CHECK(cfg.film.kind == MaterialKind::drude);
  CHECK(rel(cfg.film.plasma_frequency, constants::ev(9.0)) < 1e-15);
  REQUIRE(cfg.film.relaxation.has_value());
  CHECK(rel(cfg.film.relaxation->gamma_room, constants::ev(0.035)) < 1e-15);
  CHECK(cfg.plate_left.name == "sapphire");
  CHECK(cfg.plate_right.name == "sapphire");
  REQUIRE(cfg.grid.has_value());
  CHECK(cfg.grid->count == 3);
  CHECK(cfg.tol == 1e-6);
  CHECK(cfg.threads == 1);
  CHECK_NOTHROW(cfg.validate());

  const LayeredConfig d = cfg.layered(Approach::drude, 100e-9, 300.0);
  CHECK(std::holds_alternative<DrudeModel>(d.film));
  CHECK(std::holds_alternative<OscillatorModel>(d.plate_left));
  const LayeredConfig p = cfg.layered(Approach::plasma, 100e-9, 300.0);
  REQUIRE(std::holds_alternative<PlasmaModel>(p.film));
  CHECK(rel(std::get<PlasmaModel>(p.film).plasma_frequency, constants::ev(9.0)) < 1e-15);
}

TEST_CASE("oscillator and plasma materials") {
  const RunConfig cfg = parse(R"([material.glass]
type = "oscillator"
strengths = [1.0, 2.0]
resonances_eV = [0.1, 10.0]

[material.pl]
type = "plasma"
omega_p_eV = 7.5

[configuration]
film = "pl"
plate_left = "glass"
plate_right = "vacuum"
thickness_nm = 42
)");
  CHECK(cfg.film.kind == MaterialKind::plasma);
  CHECK(cfg.plate_left.name == "glass");
  REQUIRE(cfg.plate_left.terms.size() == 2);
  CHECK(rel(cfg.plate_left.terms[1].resonance, constants::ev(10.0)) < 1e-15);
  CHECK(cfg.plate_right.kind == MaterialKind::vacuum);
  CHECK(rel(cfg.thickness, 42e-9) < 1e-15);
  // A plasma-only metal has no Drude form.
  CHECK_THROWS_AS(build_model(cfg.film, Approach::drude), ConfigError);
  CHECK(std::holds_alternative<PlasmaModel>(build_model(cfg.film, Approach::plasma)));
}

TEST_CASE("config diagnostics carry line and field") {
  const std::string bad_key = config_error("[configuration]\nfilm = \"gold\"\ncolour = \"red\"\n");
  CHECK(bad_key.find("test.toml:3") != std::string::npos);
  CHECK(bad_key.find("colour") != std::string::npos);

  const std::string bad_number = config_error("[run]\n\ntol = \"small\"\n");
  CHECK(bad_number.find("test.toml:3") != std::string::npos);
  CHECK(bad_number.find("tol") != std::string::npos);

  const std::string bad_tol = config_error("[run]\ntol = 0.5\n");
  CHECK(bad_tol.find("test.toml:2") != std::string::npos);

  const std::string unknown_material = config_error("[configuration]\nfilm = \"unobtainium\"\n");
  CHECK(unknown_material.find("test.toml:2") != std::string::npos);
  CHECK(unknown_material.find("unobtainium") != std::string::npos);

  CHECK(config_error("[material.x]\nomega_p_eV = 9\n").find("missing key 'type'") != std::string::npos);
  CHECK(config_error("[material.x]\ntype = \"drude\"\nomega_p_eV = 9\n").find("gamma_eV") != std::string::npos);
  CHECK(config_error("[material.x]\ntype = \"metal\"\n").find("test.toml:2") != std::string::npos);
  CHECK(config_error("[elsewhere]\nkey = 1\n").find("unknown section") != std::string::npos);
  CHECK(config_error("[run]\ncommand = \"sweep-thickness\"\n").find("needs a grid") != std::string::npos);
  CHECK(config_error("[run]\ncommand = \"point\"\n").empty());
  CHECK_THROWS_AS(load_config("/nonexistent/run.toml"), ConfigError);
}

TEST_CASE("tabulated material resolves its data file relative to the config") {
  const fs::path dir = scratch_dir();
  {
    std::ofstream t(dir / "au.txt");
    t << "# omega_eV n k\n0.01 20 80\n0.1 5 40\n1 0.5 8\n10 1.0 0.5\n";
  }
  const std::string text = R"([material.au_table]
type = "tabulated"
data_file = "au.txt"
omega_p_eV = 9
gamma_eV = 0.035

[configuration]
film = "au_table"
)";
  const RunConfig cfg = parse(text, dir);
  REQUIRE(cfg.film.table);
  CHECK(cfg.film.table->samples().size() == 4);
  const DielectricModel drude = build_model(cfg.film, Approach::drude);
  REQUIRE(std::holds_alternative<TabulatedModel>(drude));
  CHECK(std::holds_alternative<DrudeTail>(std::get<TabulatedModel>(drude).extrapolation));
  const DielectricModel plasma = build_model(cfg.film, Approach::plasma);
  REQUIRE(std::holds_alternative<TabulatedModel>(plasma));
  const auto& tail = std::get<TabulatedModel>(plasma).extrapolation;
  REQUIRE(std::holds_alternative<PlasmaTail>(tail));
  CHECK(std::get<PlasmaTail>(tail).subtract_drude.has_value());

  CHECK(config_error("[material.t]\ntype = \"tabulated\"\ndata_file = \"missing.txt\"\nomega_p_eV = 9\n", dir)
            .find("data_file") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("thickness sweep CSV schema, values and determinism") {
  RunConfig cfg = parse(kSweepConfig);
  const Table t = sweep_thickness(cfg);
  CHECK_FALSE(t.any_error);
  const std::vector<std::string> expected_head = {"a_nm",        "F_drude_J_m2", "F_plasma_J_m2", "ratio_F",
                                                  "P_drude_Pa",  "P_plasma_Pa",  "ratio_P",       "log10_abs_F_plasma",
                                                  "l_max_drude", "l_max_plasma", "error"};
  REQUIRE(t.columns.size() >= expected_head.size());
  for (std::size_t i = 0; i < expected_head.size(); ++i) CHECK(t.columns[i] == expected_head[i]);

  const std::string first = csv(t);
  const auto rows = lines(first);
  REQUIRE(rows.size() == 4);
  const auto head = split(rows[0]);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto cells = split(rows[r]);
    REQUIRE(cells.size() == head.size());
    auto col = [&](const std::string& name) {
      for (std::size_t i = 0; i < head.size(); ++i)
        if (head[i] == name) return cells[i];
      return std::string("<missing>");
    };
    const double fd = std::stod(col("F_drude_J_m2")), fp = std::stod(col("F_plasma_J_m2"));
    CHECK(rel(std::stod(col("ratio_F")), fd / fp) < 1e-10);
    CHECK(col("error").empty());
    // Self-describing rows.
    CHECK(col("film") == "au9");
    CHECK(col("plate_left") == "sapphire");
    CHECK(std::stod(col("omega_p_eV")) == doctest::Approx(9.0));
    CHECK(std::stod(col("gamma_eV")) == doctest::Approx(0.035));
    CHECK(std::stod(col("T_K")) == 300.0);
    CHECK(col("models").find("drude") != std::string::npos);
  }
  // 12 significant digits, '.' separator.
  CHECK(split(rows[2])[0] == "100");

  CHECK(csv(sweep_thickness(cfg)) == first);
  cfg.threads = 3;
  CHECK(csv(sweep_thickness(cfg)) == first);
}

TEST_CASE("temperature sweep applies the relaxation law per point") {
  RunConfig cfg = parse(kSweepConfig);
  cfg.command = Command::sweep_temperature;
  cfg.grid = parse_grid("150,300,2,linear");
  cfg.thickness = 55e-9;
  cfg.validate();
  const Table t = sweep_temperature(cfg);
  const auto rows = lines(csv(t));
  REQUIRE(rows.size() == 3);
  const auto head = split(rows[0]);
  std::size_t gi = 0;
  while (gi < head.size() && head[gi] != "gamma_eV") ++gi;
  REQUIRE(gi < head.size());
  CHECK(std::stod(split(rows[1])[gi]) == doctest::Approx(0.0175));
  CHECK(std::stod(split(rows[2])[gi]) == doctest::Approx(0.035));
  CHECK(head[0] == "T_K");
}

TEST_CASE("per-point failures are recorded and the run continues") {
  RunConfig cfg = parse(kSweepConfig);
  cfg.grid = parse_grid("40000,60000,2,linear");
  cfg.approach = ApproachChoice::plasma;
  const Table t = sweep_thickness(cfg);
  CHECK(t.any_error);
  const auto rows = lines(csv(t));
  REQUIRE(rows.size() == 3);
  const auto head = split(rows[0]);
  std::size_t ei = 0;
  while (head[ei] != "error") ++ei;
  CHECK(split(rows[1])[ei].empty());
  CHECK_FALSE(split(rows[2])[ei].empty());
  std::ostringstream sink;
  CHECK(execute(cfg, sink) == 2);

  // Log-space mode fills the log column past the linear range.
  cfg.log_space = true;
  const auto log_rows = lines(csv(sweep_thickness(cfg)));
  std::size_t li = 0;
  while (head[li] != "log10_abs_F_plasma") ++li;
  const double log10_f = std::stod(split(log_rows[2])[li]);
  CHECK(log10_f < -2000.0);
  CHECK(split(log_rows[2])[ei].empty());
}

TEST_CASE("JSON output mirrors the CSV with a meta block") {
  RunConfig cfg = parse(kSweepConfig);
  cfg.format = Format::json;
  const Table t = sweep_thickness(cfg);
  std::ostringstream out;
  write_json(t, cfg, out);
  const auto doc = nlohmann::json::parse(out.str());
  CHECK(doc.at("meta").at("tol").get<double>() == 1e-6);
  CHECK(doc.at("meta").at("command") == "sweep-thickness");
  CHECK(doc.at("meta").contains("version"));
  CHECK(doc.at("meta").at("grid").at("count") == 3);
  CHECK(doc.at("columns").get<std::vector<std::string>>() == t.columns);
  REQUIRE(doc.at("rows").size() == 3);
  CHECK(doc.at("rows")[1].at("a_nm").get<double>() == doctest::Approx(100.0));
}

TEST_CASE("compare report flags oracle agreement") {
  RunConfig cfg = parse(kSweepConfig);
  cfg.command = Command::compare;
  cfg.thickness = 150e-9;
  const Table t = compare(cfg);
  REQUIRE(t.columns.size() == 7);
  CHECK(t.columns[6] == "flag");
  bool saw_flag = false;
  for (const auto& row : t.rows) {
    if (const auto* f = std::get_if<std::string>(&row[6]); f && (*f == "pass" || *f == "fail")) saw_flag = true;
  }
  CHECK(saw_flag);
  CHECK(format_real(0.1) == "0.1");
  CHECK(format_real(-1.23456789012345e-9) == "-1.23456789012e-09");
}

TEST_CASE("fixture checks") {
  CHECK(evaluate_check(Check::relative, 1.01, 1.0, 0.02));
  CHECK_FALSE(evaluate_check(Check::relative, 1.03, 1.0, 0.02));
  CHECK(evaluate_check(Check::factor, 1.5, 3.0, 2.0));
  CHECK_FALSE(evaluate_check(Check::factor, 1.4, 3.0, 2.0));
  CHECK(evaluate_check(Check::upper_bound, 1.0, 1.0, 0.0));
  CHECK(evaluate_check(Check::lower_bound, 2.0, 1.0, 0.0));
  CHECK(evaluate_check(Check::sig_figs, -3.0573e-9, -3.05728e-9, 4));
  CHECK_FALSE(evaluate_check(Check::sig_figs, -3.058e-9, -3.057e-9, 4));
  CHECK(evaluate_check(Check::absolute, 0.0, 0.0, 0.0));
}

TEST_CASE("command-line exit status") {
  const fs::path dir = scratch_dir();
  const fs::path out = dir / "out.txt";
  CHECK(run_cli("--command point --a-nm 100 --threads 1", out) == 0);
  CHECK(slurp(out).rfind("a_nm,F_drude_J_m2", 0) == 0);

  CHECK(run_cli("--command point --tol 0.5", out) == 1);
  CHECK(run_cli("--config /nonexistent/run.toml", out) == 1);
  CHECK(run_cli("--no-such-flag", out) == 1);
  CHECK(run_cli("--command sweep-thickness", out) == 1);

  {
    std::ofstream cfg(dir / "run.toml");
    cfg << kSweepConfig;
  }
  const fs::path csv_file = dir / "sweep.csv";
  CHECK(run_cli("--config " + (dir / "run.toml").string() + " --out " + csv_file.string(), out) == 0);
  const std::string a = slurp(csv_file);
  CHECK(run_cli("--config " + (dir / "run.toml").string() + " --out " + csv_file.string(), out) == 0);
  CHECK(slurp(csv_file) == a);
  CHECK(lines(a).size() == 4);

  CHECK(run_cli("--command sweep-thickness --approach plasma --grid 40000,60000,2 --threads 1", out) == 2);

  // Fixture runner: 3 exactly when some fixture fails.
  const auto outcomes = run_fixtures(1);
  bool any_fail = false;
  for (const auto& f : outcomes) any_fail = any_fail || !f.pass;
  CHECK(run_cli("--command fixtures --threads 1", out) == (any_fail ? 3 : 0));
  fs::remove_all(dir);
}
