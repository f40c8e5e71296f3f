#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "casimir/config.hpp"
#include "casimir/lifshitz.hpp"

namespace casimir::run {

// Engine results for one (a, T) point under each requested approach.
struct PointRecord {
  double a = 0.0;  // m
  double T = 0.0;  // K
  std::optional<FreeEnergyResult> f_drude;
  std::optional<FreeEnergyResult> f_plasma;
  std::optional<PressureResult> p_drude;
  std::optional<PressureResult> p_plasma;
  std::string error;
};

// Engine failures are caught and reported in `error`.
PointRecord evaluate_point(const RunConfig& cfg, double a, double T);

using Cell = std::variant<std::monostate, double, long long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  bool any_error = false;
};

Table sweep_thickness(const RunConfig& cfg);
Table sweep_temperature(const RunConfig& cfg);
Table point_table(const RunConfig& cfg);
Table compare(const RunConfig& cfg);

// %.12g for reals; empty cells for missing values.
void write_csv(const Table& table, std::ostream& out);
void write_json(const Table& table, const RunConfig& cfg, std::ostream& out);
std::string format_real(double v);

// Runs the configured command and writes its output. Returns the process
// exit status: 0 success, 2 numerical failure, 3 fixture failure.
int execute(const RunConfig& cfg, std::ostream& out);

}  // namespace casimir::run
