#include "casimir/materials.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "casimir/constants.hpp"
#include "casimir/quadrature.hpp"

namespace casimir {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Unnormalized continuous piecewise power law.
double relaxation_shape(const RelaxationLaw& law, double t) {
  const double t1 = law.debye_temperature / 4.0;
  const double t_he = std::min(law.helium_crossover, t1);
  if (t >= t1) return t;
  if (t >= t_he) return t1 * std::pow(t / t1, 5);
  return t1 * std::pow(t_he / t1, 5) * (t / t_he) * (t / t_he);
}

void check_law(const RelaxationLaw& law) {
  if (!(law.gamma_room > 0.0)) throw std::invalid_argument("relaxation: gamma must be > 0");
  if (!(law.debye_temperature > 0.0)) throw std::invalid_argument("relaxation: Debye temperature must be > 0");
  if (!(law.helium_crossover > 0.0)) throw std::invalid_argument("relaxation: helium crossover must be > 0");
  if (!(law.reference_temperature > 0.0)) throw std::invalid_argument("relaxation: reference temperature must be > 0");
}

}  // namespace

double relaxation(const RelaxationLaw& law, double temperature) {
  if (!(temperature > 0.0)) throw std::domain_error("relaxation: temperature must be > 0");
  if (temperature == law.reference_temperature) return law.gamma_room;
  return law.gamma_room * (relaxation_shape(law, temperature) / relaxation_shape(law, law.reference_temperature));
}

// ---------------------------------------------------------------------------
// Optical table
// ---------------------------------------------------------------------------

OpticalTable::OpticalTable(std::vector<OpticalSample> samples) : samples_(std::move(samples)) {
  if (samples_.size() < 2) throw std::invalid_argument("optical table: need at least 2 samples");
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const auto& s = samples_[i];
    if (!(s.omega > 0.0)) throw std::invalid_argument("optical table: frequencies must be > 0");
    if (!(s.n > 0.0)) throw std::invalid_argument("optical table: n must be > 0");
    if (!(s.k >= 0.0)) throw std::invalid_argument("optical table: k must be >= 0");
    if (i > 0 && !(s.omega > samples_[i - 1].omega)) {
      throw std::invalid_argument("optical table: frequencies must be strictly increasing");
    }
  }
}

double OpticalTable::imag_permittivity(double omega) const {
  if (omega < omega_min() || omega > omega_max()) return 0.0;
  auto it = std::upper_bound(samples_.begin(), samples_.end(), omega,
                             [](double w, const OpticalSample& s) { return w < s.omega; });
  if (it == samples_.end()) --it;
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double s = std::log(omega / lo.omega) / std::log(hi.omega / lo.omega);
  const double n = lo.n * std::pow(hi.n / lo.n, s);
  const double k = (lo.k > 0.0 && hi.k > 0.0) ? lo.k * std::pow(hi.k / lo.k, s) : lo.k + s * (hi.k - lo.k);
  return 2.0 * n * k;
}

OpticalTable parse_optical_table(std::istream& in, const std::string& source) {
  std::vector<OpticalSample> samples;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream row(line);
    double omega_ev = 0.0, n = 0.0, k = 0.0;
    std::string extra;
    if (!(row >> omega_ev >> n >> k) || (row >> extra)) {
      throw std::runtime_error(source + ":" + std::to_string(line_no) + ": expected three columns `omega_eV n k`");
    }
    auto where = [&] { return source + ":" + std::to_string(line_no) + ": "; };
    if (!(omega_ev > 0.0)) throw std::runtime_error(where() + "omega_eV must be > 0");
    if (!(n > 0.0)) throw std::runtime_error(where() + "n must be > 0");
    if (!(k >= 0.0)) throw std::runtime_error(where() + "k must be >= 0");
    const double omega = constants::ev(omega_ev);
    if (!samples.empty() && !(omega > samples.back().omega)) {
      throw std::runtime_error(where() + "rows must be sorted by strictly increasing omega_eV");
    }
    samples.push_back({omega, n, k});
  }
  if (samples.size() < 2) throw std::runtime_error(source + ": need at least 2 data rows");
  return OpticalTable(std::move(samples));
}

OpticalTable load_optical_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open optical data file " + path.string());
  return parse_optical_table(in, path.string());
}

// ---------------------------------------------------------------------------
// Kramers-Kronig
// ---------------------------------------------------------------------------

namespace detail {

std::optional<double> KramersKronigMemo::find(double temperature, double xi) const {
  std::shared_lock lock(mutex_);
  auto it = values_.find({temperature, xi});
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

void KramersKronigMemo::store(double temperature, double xi, double value) {
  std::unique_lock lock(mutex_);
  values_.emplace(std::make_pair(temperature, xi), value);
}

}  // namespace detail

TabulatedModel::TabulatedModel(std::shared_ptr<const OpticalTable> table_, Extrapolation extrapolation_)
    : table(std::move(table_)),
      extrapolation(std::move(extrapolation_)),
      memo(std::make_shared<detail::KramersKronigMemo>()) {
  if (!table) throw std::invalid_argument("tabulated model: empty table");
}

namespace {

double drude_imag(double omega, double omega_p, double gamma) {
  return omega_p * omega_p * gamma / (omega * (omega * omega + gamma * gamma));
}

// (2/pi) int_0^W omega Im eps_D(omega) / (omega^2 + xi^2) d omega for the
// Drude absorption, in closed form.
double drude_tail_integral(double omega_p, double gamma, double xi, double upper) {
  auto f = [upper](double s) { return std::atan(upper / s) / s; };
  const double wp2 = omega_p * omega_p;
  double bracket = 0.0;
  if (std::fabs(xi - gamma) > 1e-4 * xi) {
    bracket = (f(gamma) - f(xi)) / ((xi - gamma) * (xi + gamma));
  } else {
    // Symmetric difference quotient of f at the midpoint.
    const double s = 0.5 * (xi + gamma);
    const double df = -upper / (s * (s * s + upper * upper)) - std::atan(upper / s) / (s * s);
    bracket = -df / (2.0 * s);
  }
  return (2.0 / constants::pi) * wp2 * gamma * bracket;
}

}  // namespace

double kk_transform(const OpticalTable& table, const Extrapolation& extrapolation, double xi,
                    double temperature) {
  if (!(xi > 0.0)) throw std::domain_error("kk_transform: xi must be > 0");
  const double xi2 = xi * xi;

  std::optional<std::pair<double, double>> subtract;  // (omega_p, gamma)
  if (const auto* tail = std::get_if<PlasmaTail>(&extrapolation); tail && tail->subtract_drude) {
    subtract = std::make_pair(tail->plasma_frequency, relaxation(*tail->subtract_drude, temperature));
  }

  auto integrand = [&](double t) {
    const double omega = std::exp(t);
    double im = table.imag_permittivity(omega);
    if (subtract) im -= drude_imag(omega, subtract->first, subtract->second);
    const double w2 = omega * omega;
    return w2 * im / (w2 + xi2);
  };
  std::vector<double> pts;
  pts.reserve(table.samples().size());
  for (const auto& s : table.samples()) pts.push_back(std::log(s.omega));
  const auto tabulated = quadrature::integrate(integrand, pts, {.relative = 1e-10, .absolute = 1e-300});

  double eps = 1.0 + (2.0 / constants::pi) * tabulated.value;
  std::visit(overloaded{
                 [&](const DrudeTail& d) {
                   eps += drude_tail_integral(d.plasma_frequency, relaxation(d.relaxation, temperature), xi,
                                              table.omega_min());
                 },
                 [&](const PlasmaTail& p) { eps += p.plasma_frequency * p.plasma_frequency / xi2; },
             },
             extrapolation);
  return eps;
}

// ---------------------------------------------------------------------------
// Models
// ---------------------------------------------------------------------------

void validate(const DielectricModel& model) {
  std::visit(overloaded{
                 [](const VacuumModel&) {},
                 [](const DrudeModel& m) {
                   if (!(m.plasma_frequency > 0.0)) throw std::invalid_argument("drude: omega_p must be > 0");
                   check_law(m.relaxation);
                 },
                 [](const PlasmaModel& m) {
                   if (!(m.plasma_frequency > 0.0)) throw std::invalid_argument("plasma: omega_p must be > 0");
                 },
                 [](const OscillatorModel& m) {
                   for (const auto& t : m.terms) {
                     if (!(t.strength >= 0.0)) throw std::invalid_argument("oscillator: strengths must be >= 0");
                     if (!(t.resonance > 0.0)) throw std::invalid_argument("oscillator: resonances must be > 0");
                   }
                 },
                 [](const TabulatedModel& m) {
                   std::visit(overloaded{
                                  [](const DrudeTail& d) {
                                    if (!(d.plasma_frequency > 0.0))
                                      throw std::invalid_argument("drude tail: omega_p must be > 0");
                                    check_law(d.relaxation);
                                  },
                                  [](const PlasmaTail& p) {
                                    if (!(p.plasma_frequency > 0.0))
                                      throw std::invalid_argument("plasma tail: omega_p must be > 0");
                                    if (p.subtract_drude) check_law(*p.subtract_drude);
                                  },
                              },
                              m.extrapolation);
                 },
             },
             model);
}

double evaluate(const DielectricModel& model, double xi, double temperature) {
  if (!(xi >= 0.0)) throw std::domain_error("evaluate: xi must be >= 0");
  return std::visit(
      overloaded{
          [](const VacuumModel&) { return 1.0; },
          [&](const DrudeModel& m) {
            if (xi == 0.0) throw std::domain_error("evaluate: Drude permittivity diverges at xi = 0");
            const double g = relaxation(m.relaxation, temperature);
            return 1.0 + m.plasma_frequency * m.plasma_frequency / (xi * (xi + g));
          },
          [&](const PlasmaModel& m) {
            if (xi == 0.0) throw std::domain_error("evaluate: plasma permittivity diverges at xi = 0");
            const double r = m.plasma_frequency / xi;
            return 1.0 + r * r;
          },
          [&](const OscillatorModel& m) {
            double eps = 1.0;
            for (const auto& t : m.terms) {
              const double w2 = t.resonance * t.resonance;
              eps += t.strength * w2 / (w2 + xi * xi);
            }
            return eps;
          },
          [&](const TabulatedModel& m) {
            if (xi == 0.0) throw std::domain_error("evaluate: tabulated permittivity diverges at xi = 0");
            if (auto hit = m.memo->find(temperature, xi)) return *hit;
            const double eps = kk_transform(*m.table, m.extrapolation, xi, temperature);
            m.memo->store(temperature, xi, eps);
            return eps;
          },
      },
      model);
}

ZeroFrequencyClass zero_frequency_class(const DielectricModel& model) {
  return std::visit(overloaded{
                        [](const VacuumModel&) -> ZeroFrequencyClass { return FiniteEpsilon{1.0}; },
                        [](const DrudeModel& m) -> ZeroFrequencyClass {
                          return DrudeLike{m.plasma_frequency, m.relaxation};
                        },
                        [](const PlasmaModel& m) -> ZeroFrequencyClass { return PlasmaLike{m.plasma_frequency}; },
                        [](const OscillatorModel& m) -> ZeroFrequencyClass {
                          double eps0 = 1.0;
                          for (const auto& t : m.terms) eps0 += t.strength;
                          return FiniteEpsilon{eps0};
                        },
                        [](const TabulatedModel& m) -> ZeroFrequencyClass {
                          if (const auto* d = std::get_if<DrudeTail>(&m.extrapolation)) {
                            return DrudeLike{d->plasma_frequency, d->relaxation};
                          }
                          return PlasmaLike{std::get<PlasmaTail>(m.extrapolation).plasma_frequency};
                        },
                    },
                    model);
}

std::optional<double> plasma_frequency(const DielectricModel& model) {
  return std::visit(overloaded{
                        [](const DrudeLike& d) -> std::optional<double> { return d.plasma_frequency; },
                        [](const PlasmaLike& p) -> std::optional<double> { return p.plasma_frequency; },
                        [](const FiniteEpsilon&) -> std::optional<double> { return std::nullopt; },
                    },
                    zero_frequency_class(model));
}

std::string describe(const DielectricModel& model) {
  char buf[160];
  std::visit(overloaded{
                 [&](const VacuumModel&) { std::snprintf(buf, sizeof buf, "vacuum"); },
                 [&](const DrudeModel& m) {
                   std::snprintf(buf, sizeof buf, "drude(wp=%.6g eV;gamma300=%.6g eV;TD=%.6g K)",
                                 constants::to_ev(m.plasma_frequency), constants::to_ev(m.relaxation.gamma_room),
                                 m.relaxation.debye_temperature);
                 },
                 [&](const PlasmaModel& m) {
                   std::snprintf(buf, sizeof buf, "plasma(wp=%.6g eV)", constants::to_ev(m.plasma_frequency));
                 },
                 [&](const OscillatorModel& m) {
                   std::snprintf(buf, sizeof buf, "oscillator(%zu terms)", m.terms.size());
                 },
                 [&](const TabulatedModel& m) {
                   const bool drude = std::holds_alternative<DrudeTail>(m.extrapolation);
                   std::snprintf(buf, sizeof buf, "tabulated(%zu rows;%s tail)", m.table->samples().size(),
                                 drude ? "drude" : "plasma");
                 },
             },
             model);
  return buf;
}

DrudeModel gold_drude() {
  return {constants::ev(9.0), RelaxationLaw{constants::ev(0.035), 165.0, 4.2, 300.0}};
}

PlasmaModel gold_plasma() { return {constants::ev(9.0)}; }

OscillatorModel sapphire() { return {{{7.03, 1.0e14}, {2.072, 2.0e16}}}; }

}  // namespace casimir
