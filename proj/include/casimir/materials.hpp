#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace casimir {

// Temperature law of the Drude relaxation parameter: gamma ~ T above T_D/4,
// ~ T^5 (Bloch-Grueneisen) between T_He and T_D/4, ~ T^2 below T_He. The
// three branches are joined continuously and pinned to gamma_room at 300 K.
struct RelaxationLaw {
  double gamma_room = 0.0;          // rad/s at the reference temperature
  double debye_temperature = 165.0;  // K
  double helium_crossover = 4.2;    // K
  double reference_temperature = 300.0;

  bool operator==(const RelaxationLaw&) const = default;
};

double relaxation(const RelaxationLaw& law, double temperature);

struct OpticalSample {
  double omega;  // rad/s
  double n;
  double k;
};

// Tabulated complex refractive index n + i k, sorted by frequency.
class OpticalTable {
 public:
  explicit OpticalTable(std::vector<OpticalSample> samples);

  const std::vector<OpticalSample>& samples() const { return samples_; }
  double omega_min() const { return samples_.front().omega; }
  double omega_max() const { return samples_.back().omega; }

  // Im eps = 2 n k with n and k interpolated linearly in log-log
  // coordinates (k linearly in log omega where it vanishes). Zero outside
  // the tabulated range.
  double imag_permittivity(double omega) const;

 private:
  std::vector<OpticalSample> samples_;
};

// Reads whitespace-separated `omega_eV n k` rows; `#` starts a comment line.
OpticalTable parse_optical_table(std::istream& in, const std::string& source = "<stream>");
OpticalTable load_optical_table(const std::filesystem::path& path);

struct VacuumModel {
  bool operator==(const VacuumModel&) const = default;
};

struct DrudeModel {
  double plasma_frequency = 0.0;  // rad/s
  RelaxationLaw relaxation;

  bool operator==(const DrudeModel&) const = default;
};

struct PlasmaModel {
  double plasma_frequency = 0.0;  // rad/s

  bool operator==(const PlasmaModel&) const = default;
};

struct OscillatorTerm {
  double strength = 0.0;
  double resonance = 0.0;  // rad/s

  bool operator==(const OscillatorTerm&) const = default;
};

struct OscillatorModel {
  std::vector<OscillatorTerm> terms;

  bool operator==(const OscillatorModel&) const = default;
};

// Low-frequency extrapolations of tabulated data below omega_min.
struct DrudeTail {
  double plasma_frequency = 0.0;
  RelaxationLaw relaxation;

  bool operator==(const DrudeTail&) const = default;
};

struct PlasmaTail {
  double plasma_frequency = 0.0;
  // When set, the free-electron Drude absorption with this law is removed
  // from the tabulated range so only the core-electron part is transformed.
  std::optional<RelaxationLaw> subtract_drude;

  bool operator==(const PlasmaTail&) const = default;
};

using Extrapolation = std::variant<DrudeTail, PlasmaTail>;

namespace detail {
// Thread-safe memo of Kramers-Kronig values keyed by (T, xi).
class KramersKronigMemo {
 public:
  std::optional<double> find(double temperature, double xi) const;
  void store(double temperature, double xi, double value);

 private:
  mutable std::shared_mutex mutex_;
  std::map<std::pair<double, double>, double> values_;
};
}  // namespace detail

struct TabulatedModel {
  TabulatedModel(std::shared_ptr<const OpticalTable> table, Extrapolation extrapolation);

  std::shared_ptr<const OpticalTable> table;
  Extrapolation extrapolation;
  std::shared_ptr<detail::KramersKronigMemo> memo;

  // Same table instance and extrapolation; the memo is not compared.
  bool operator==(const TabulatedModel& o) const {
    return table == o.table && extrapolation == o.extrapolation;
  }
};

using DielectricModel = std::variant<VacuumModel, DrudeModel, PlasmaModel, OscillatorModel, TabulatedModel>;

// Validates the model invariants (omega_p > 0, C_j >= 0, omega_j > 0).
void validate(const DielectricModel& model);

// eps(i xi) on the imaginary frequency axis. Throws std::domain_error for
// xi < 0 and for xi = 0 on models with a pole at zero frequency.
double evaluate(const DielectricModel& model, double xi, double temperature);

// eps(i xi) = 1 + (2/pi) int_0^inf omega Im eps(omega) / (omega^2 + xi^2) d omega
double kk_transform(const OpticalTable& table, const Extrapolation& extrapolation, double xi,
                    double temperature);

struct FiniteEpsilon {
  double eps0 = 1.0;
};
struct DrudeLike {
  double plasma_frequency = 0.0;
  RelaxationLaw relaxation;
};
struct PlasmaLike {
  double plasma_frequency = 0.0;
};
using ZeroFrequencyClass = std::variant<FiniteEpsilon, DrudeLike, PlasmaLike>;

ZeroFrequencyClass zero_frequency_class(const DielectricModel& model);

// Plasma frequency carried by the model (Drude, Plasma or a tabulated tail).
std::optional<double> plasma_frequency(const DielectricModel& model);

std::string describe(const DielectricModel& model);

// Au: omega_p = 9 eV, gamma(300 K) = 0.035 eV, T_D = 165 K.
DrudeModel gold_drude();
PlasmaModel gold_plasma();
// Two-oscillator sapphire: C_IR = 7.03, omega_IR = 1e14 rad/s,
// C_UV = 2.072, omega_UV = 2e16 rad/s.
OscillatorModel sapphire();

}  // namespace casimir
