#include "casimir/lifshitz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <variant>
#include <vector>

#include "casimir/asymptotics.hpp"
#include "casimir/constants.hpp"
#include "casimir/parallel.hpp"
#include "casimir/quadrature.hpp"

namespace casimir {

namespace {

using constants::boltzmann;
using constants::hbar;
using constants::pi;
using constants::speed_of_light;

constexpr int kMaxMatsubara = 100000;
constexpr int kRunLength = 5;
constexpr double kUnderflowOmegaTilde = 600.0;
constexpr double kLinearMaxThickness = 50e-6;
// Explicit nonrelativistic terms before the remainder is replaced by its
// midpoint-rule integral.
constexpr int kNonrelativisticSwitch = 2000;

double energy_prefactor(double a, double T) { return boltzmann * T / (8.0 * pi * a * a); }
double pressure_prefactor(double a, double T) { return -boltzmann * T / (8.0 * pi * a * a * a); }

void check_tolerance(double tol) {
  if (!(tol > 0.0 && tol <= 1e-2)) throw std::invalid_argument("tolerance must lie in (0, 1e-2]");
}

struct Permittivities {
  double film;
  double left;
  double right;
};

Permittivities permittivities(const LayeredConfig& c, double xi) {
  return {evaluate(c.film, xi, c.temperature), evaluate(c.plate_left, xi, c.temperature),
          evaluate(c.plate_right, xi, c.temperature)};
}

double tm_coefficient(double eps_f, double k_f, double eps_p, double k_p) {
  return (eps_p * k_f - eps_f * k_p) / (eps_p * k_f + eps_f * k_p);
}

double te_coefficient(double k_f, double k_p) { return (k_f - k_p) / (k_f + k_p); }

// Round-trip products x = r+ r- e^{-k0} of one u sample, l >= 1.
struct ModeProducts {
  double tm;
  double te;
  double k0;
};

ModeProducts mode_products(const Permittivities& e, double zeta, double u) {
  const double z2 = zeta * zeta;
  const double u2 = u * u;
  const double k0 = std::sqrt(u2 + e.film * z2);
  const double kl = std::sqrt(u2 + e.left * z2);
  const double kr = std::sqrt(u2 + e.right * z2);
  const double decay = std::exp(-k0);
  const double tm = tm_coefficient(e.film, k0, e.right, kr) * tm_coefficient(e.film, k0, e.left, kl);
  const double te = te_coefficient(k0, kr) * te_coefficient(k0, kl);
  return {tm * decay, te * decay, k0};
}

// Bose-like pressure weight x / (1 - x).
double bose(double x) { return x / (1.0 - x); }

void require_converged(const quadrature::Result& r, double quad_tol, const char* what) {
  if (r.converged) return;
  if (std::isfinite(r.value) && r.abs_error <= quad_tol * std::fabs(r.value)) return;
  const double rel = r.value != 0.0 ? r.abs_error / std::fabs(r.value) : r.abs_error;
  throw NumericalError(std::string(what) + ": quadrature did not reach the requested tolerance", rel);
}

quadrature::Result integrate_u(const std::function<double(double)>& f, std::vector<double> breakpoints,
                               double quad_tol, const char* what) {
  const quadrature::Tolerance tol{quad_tol, 1e-300, 4000};
  auto r = quadrature::integrate_half_line(f, std::move(breakpoints), tol);
  require_converged(r, quad_tol, what);
  return r;
}

std::vector<double> u_breakpoints(const MatsubaraContext& ctx) {
  std::vector<double> b{ctx.zeta};
  if (ctx.omega_p_tilde) b.push_back(*ctx.omega_p_tilde);
  return b;
}

// ---------------------------------------------------------------------------
// Zero frequency: eps ~ residue / xi^order as xi -> 0.
// ---------------------------------------------------------------------------

struct PoleForm {
  int order = 0;
  double residue = 1.0;
  double omega_tilde = 0.0;  // 2 a omega_p / c for order 2
};

PoleForm pole_form(const DielectricModel& model, double a, double T) {
  return std::visit(
      [&](const auto& z) -> PoleForm {
        using Z = std::decay_t<decltype(z)>;
        if constexpr (std::is_same_v<Z, FiniteEpsilon>) {
          return {0, z.eps0, 0.0};
        } else if constexpr (std::is_same_v<Z, DrudeLike>) {
          return {1, z.plasma_frequency * z.plasma_frequency / relaxation(z.relaxation, T), 0.0};
        } else {
          return {2, z.plasma_frequency * z.plasma_frequency, 2.0 * a * z.plasma_frequency / speed_of_light};
        }
      },
      zero_frequency_class(model));
}

double k_at_zero(const PoleForm& p, double u) { return p.order == 2 ? std::hypot(u, p.omega_tilde) : u; }

double tm_at_zero(const PoleForm& f, double k_f, const PoleForm& p, double k_p) {
  if (f.order > p.order) return -1.0;
  if (p.order > f.order) return 1.0;
  if (f.order < 2) return (p.residue - f.residue) / (p.residue + f.residue);
  return tm_coefficient(f.residue, k_f, p.residue, k_p);
}

double te_at_zero(const PoleForm& f, double k_f, const PoleForm& p, double k_p) {
  if (f.order < 2 && p.order < 2) return 0.0;
  return te_coefficient(k_f, k_p);
}

struct ZeroSetup {
  PoleForm film;
  PoleForm left;
  PoleForm right;

  bool te_vanishes() const { return film.order < 2 && left.order < 2 && right.order < 2; }
  // r_TM products independent of u: no pair of order-2 layers across an interface.
  bool tm_constant() const { return film.order < 2 || (left.order < 2 && right.order < 2); }
};

ZeroSetup zero_setup(const LayeredConfig& c) {
  return {pole_form(c.film, c.thickness, c.temperature), pole_form(c.plate_left, c.thickness, c.temperature),
          pole_form(c.plate_right, c.thickness, c.temperature)};
}

// Li3 on [-1, 1] through Li3(-x) = Li3(x^2) / 4 - Li3(x).
double li3_signed(double rho) {
  rho = std::clamp(rho, -1.0, 1.0);
  if (rho >= 0.0) return polylog(3, rho);
  const double x = -rho;
  return 0.25 * polylog(3, x * x) - polylog(3, x);
}

// Dimensionless l = 0 integrals: energy S = int u ln(1 - x) du and pressure
// int u k0 x / (1 - x) du, per polarization.
struct ZeroIntegrals {
  double tm = 0.0;
  double te = 0.0;
  double error = 0.0;
};

ZeroIntegrals zero_integrals(const ZeroSetup& s, bool for_pressure, double quad_tol) {
  ZeroIntegrals out;
  auto products = [&s](double u) {
    const double kf = k_at_zero(s.film, u);
    const double kl = k_at_zero(s.left, u);
    const double kr = k_at_zero(s.right, u);
    const double decay = std::exp(-kf);
    const double tm = tm_at_zero(s.film, kf, s.right, kr) * tm_at_zero(s.film, kf, s.left, kl);
    const double te = te_at_zero(s.film, kf, s.right, kr) * te_at_zero(s.film, kf, s.left, kl);
    return ModeProducts{tm * decay, te * decay, kf};
  };
  std::vector<double> bps;
  for (const auto* p : {&s.film, &s.left, &s.right}) {
    if (p->order == 2) bps.push_back(p->omega_tilde);
  }

  if (s.tm_constant() && s.film.order < 2) {
    const double rho = tm_at_zero(s.film, 1.0, s.right, 1.0) * tm_at_zero(s.film, 1.0, s.left, 1.0);
    out.tm = for_pressure ? 2.0 * li3_signed(rho) : -li3_signed(rho);
  } else if (s.tm_constant()) {
    // film of order 2 against lower-order plates: r_TM = -1 on both sides
    const double w = s.film.omega_tilde;
    const double li2 = polylog_exp(2, w);
    const double li3 = polylog_exp(3, w);
    if (for_pressure) {
      const double li1 = w > 0.0 ? -std::log1p(-std::exp(-w)) : 0.0;
      out.tm = w * w * li1 + 2.0 * w * li2 + 2.0 * li3;
    } else {
      out.tm = -(w * li2 + li3);
    }
  } else {
    auto f = [&](double u) {
      const auto m = products(u);
      return for_pressure ? u * m.k0 * bose(m.tm) : u * std::log1p(-m.tm);
    };
    const auto r = integrate_u(f, bps, quad_tol, "zero-frequency TM");
    out.tm = r.value;
    out.error += r.abs_error;
  }

  if (!s.te_vanishes()) {
    auto f = [&](double u) {
      const auto m = products(u);
      return for_pressure ? u * m.k0 * bose(m.te) : u * std::log1p(-m.te);
    };
    const auto r = integrate_u(f, bps, quad_tol, "zero-frequency TE");
    out.te = r.value;
    out.error += r.abs_error;
  }
  return out;
}

// ---------------------------------------------------------------------------
// l >= 1
// ---------------------------------------------------------------------------

struct TermIntegrals {
  double tm = 0.0;
  double te = 0.0;
  double error = 0.0;
};

TermIntegrals term_integrals(const LayeredConfig& c, int l, bool for_pressure, double quad_tol) {
  if (l < 1) throw std::domain_error("matsubara term: l must be >= 1");
  const MatsubaraContext ctx = matsubara_context(c, l);
  const Permittivities eps = permittivities(c, ctx.xi);
  TermIntegrals out;
  if (eps.film == eps.left && eps.film == eps.right) return out;
  const double zeta = ctx.zeta;
  const auto bps = u_breakpoints(ctx);
  auto tm = [&](double u) {
    const auto m = mode_products(eps, zeta, u);
    return for_pressure ? u * m.k0 * bose(m.tm) : u * std::log1p(-m.tm);
  };
  auto te = [&](double u) {
    const auto m = mode_products(eps, zeta, u);
    return for_pressure ? u * m.k0 * bose(m.te) : u * std::log1p(-m.te);
  };
  const auto rtm = integrate_u(tm, bps, quad_tol, "Matsubara TM");
  const auto rte = integrate_u(te, bps, quad_tol, "Matsubara TE");
  out.tm = rtm.value;
  out.te = rte.value;
  out.error = rtm.abs_error + rte.abs_error;
  return out;
}

// ---------------------------------------------------------------------------
// Matsubara summation
// ---------------------------------------------------------------------------

struct SumOutcome {
  double tail = 0.0;  // sum over l >= 1
  int l_max = 0;
  double truncation = 0.0;  // geometric envelope of the omitted terms
  bool converged = false;
};

// Sums head + term(1) + term(2) + ... in ascending order with compensated
// accumulation. Stops after kRunLength consecutive terms below tol * |partial|
// once the geometric envelope of the remainder is also below tol * |partial|.
template <class Term>
SumOutcome matsubara_sum(double head, Term&& term, double tol, int threads, int l_limit) {
  quadrature::CompensatedSum total;
  quadrature::CompensatedSum tail;
  total.add(head);
  const int workers = resolve_threads(threads);
  const int batch = workers == 1 ? 1 : 4 * workers;
  int run = 0;
  double prev = std::numeric_limits<double>::quiet_NaN();
  SumOutcome out;
  std::vector<double> values;
  for (int l = 1; l <= l_limit;) {
    const int n = std::min(batch, l_limit - l + 1);
    values.assign(static_cast<std::size_t>(n), 0.0);
    parallel_for(values.size(), workers, [&](std::size_t i) { values[i] = term(l + static_cast<int>(i)); });
    for (int i = 0; i < n; ++i) {
      const double t = values[static_cast<std::size_t>(i)];
      tail.add(t);
      total.add(t);
      const double partial = std::fabs(total.value());
      run = std::fabs(t) <= tol * partial ? run + 1 : 0;
      double envelope = 0.0;
      if (t != 0.0) {
        const double q = std::fabs(t / prev);
        envelope = q < 1.0 ? std::fabs(t) * q / (1.0 - q) : std::numeric_limits<double>::infinity();
      }
      out.tail = tail.value();
      out.l_max = l + i;
      out.truncation = envelope;
      if (run >= kRunLength && envelope <= tol * partial) {
        out.converged = true;
        return out;
      }
      prev = t;
    }
    l += n;
  }
  return out;
}

void require_sum(const SumOutcome& s, double head, const char* what) {
  if (s.converged) return;
  const double partial = std::fabs(head + s.tail);
  throw NumericalError(std::string(what) + ": Matsubara sum not converged by l = 100000",
                       partial > 0.0 ? s.truncation / partial : s.truncation);
}

void check_thickness_mode(const LayeredConfig& c, const EngineOptions& o) {
  if (c.thickness > kLinearMaxThickness && !o.log_space) {
    throw std::domain_error("thickness above 50 um needs log-space mode");
  }
}

std::optional<double> underflow_plasma_frequency(const LayeredConfig& c) {
  const auto cls = zero_frequency_class(c.film);
  const auto* p = std::get_if<PlasmaLike>(&cls);
  if (p == nullptr) return std::nullopt;
  const double w = 2.0 * c.thickness * p->plasma_frequency / speed_of_light;
  if (w > kUnderflowOmegaTilde) return p->plasma_frequency;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Nonrelativistic helpers
// ---------------------------------------------------------------------------

double nonrelativistic_rho(const LayeredConfig& c, double xi) {
  const Permittivities e = permittivities(c, xi);
  const double rr = (e.right - e.film) / (e.right + e.film);
  const double rl = (e.left - e.film) / (e.left + e.film);
  return rr * rl;
}

double nonrelativistic_rho_zero(const LayeredConfig& c) {
  const ZeroSetup s = zero_setup(c);
  return tm_at_zero(s.film, 1.0, s.right, 1.0) * tm_at_zero(s.film, 1.0, s.left, 1.0);
}

void add_scales(const DielectricModel& m, double T, std::vector<double>& out) {
  std::visit(
      [&](const auto& v) {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, DrudeModel>) {
          out.push_back(v.plasma_frequency);
          out.push_back(relaxation(v.relaxation, T));
        } else if constexpr (std::is_same_v<V, PlasmaModel>) {
          out.push_back(v.plasma_frequency);
        } else if constexpr (std::is_same_v<V, OscillatorModel>) {
          for (const auto& t : v.terms) out.push_back(t.resonance);
        } else if constexpr (std::is_same_v<V, TabulatedModel>) {
          out.push_back(v.table->omega_min());
          out.push_back(v.table->omega_max());
          std::visit(
              [&](const auto& tail) {
                out.push_back(tail.plasma_frequency);
                using X = std::decay_t<decltype(tail)>;
                if constexpr (std::is_same_v<X, DrudeTail>) out.push_back(relaxation(tail.relaxation, T));
              },
              v.extrapolation);
        }
      },
      m);
}

// Characteristic frequencies of the three layers, densified to one per decade.
std::vector<double> frequency_breakpoints(const LayeredConfig& c) {
  std::vector<double> s;
  for (const auto* m : {&c.film, &c.plate_left, &c.plate_right}) add_scales(*m, c.temperature, s);
  std::sort(s.begin(), s.end());
  if (s.empty()) return s;
  std::vector<double> out;
  for (double x = s.front(); x < s.back(); x *= 10.0) out.push_back(x);
  out.insert(out.end(), s.begin(), s.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// int_lower^inf -Li3(rho(xi)) d xi
double nonrelativistic_frequency_integral(const LayeredConfig& c, double lower, double quad_tol) {
  std::vector<double> pts{lower};
  const auto scales = frequency_breakpoints(c);
  for (double x : scales) {
    if (x > lower) pts.push_back(x);
  }
  const double scale = std::max(lower, scales.empty() ? 1e15 : scales.back());
  pts.push_back(std::numeric_limits<double>::infinity());
  auto f = [&](double xi) { return -li3_signed(nonrelativistic_rho(c, xi)); };
  const quadrature::Tolerance tol{quad_tol, 1e-300, 4000};
  const auto r = quadrature::integrate(f, pts, tol, scale);
  require_converged(r, quad_tol, "frequency integral");
  return r.value;
}

}  // namespace

// ---------------------------------------------------------------------------
// Public API
// ---------------------------------------------------------------------------

void LayeredConfig::validate() const {
  if (!(thickness > 0.0) || !std::isfinite(thickness)) throw std::invalid_argument("thickness must be > 0");
  if (!(temperature > 0.0) || !std::isfinite(temperature)) throw std::invalid_argument("temperature must be > 0");
  casimir::validate(film);
  casimir::validate(plate_left);
  casimir::validate(plate_right);
}

LayeredConfig film_in_vacuum(DielectricModel film, double thickness, double temperature) {
  return {std::move(film), VacuumModel{}, VacuumModel{}, thickness, temperature};
}

LayeredConfig film_between(DielectricModel film, DielectricModel plates, double thickness, double temperature) {
  DielectricModel left = plates;
  return {std::move(film), std::move(left), std::move(plates), thickness, temperature};
}

double first_matsubara_frequency(double temperature) { return 2.0 * pi * boltzmann * temperature / hbar; }

MatsubaraContext matsubara_context(const LayeredConfig& config, int l) {
  if (l < 0) throw std::domain_error("matsubara_context: l must be >= 0");
  MatsubaraContext ctx;
  ctx.l = l;
  ctx.xi = l * first_matsubara_frequency(config.temperature);
  ctx.zeta = 2.0 * config.thickness * ctx.xi / speed_of_light;
  if (auto wp = plasma_frequency(config.film)) ctx.omega_p_tilde = 2.0 * config.thickness * *wp / speed_of_light;
  return ctx;
}

ReflectionCoefficients reflection_coefficients(const LayeredConfig& config, const MatsubaraContext& ctx, double u) {
  if (ctx.l < 1) throw std::domain_error("reflection_coefficients: l must be >= 1");
  if (!(u >= 0.0)) throw std::domain_error("reflection_coefficients: u must be >= 0");
  const Permittivities e = permittivities(config, ctx.xi);
  const double z2 = ctx.zeta * ctx.zeta;
  const double k0 = std::sqrt(u * u + e.film * z2);
  const double kl = std::sqrt(u * u + e.left * z2);
  const double kr = std::sqrt(u * u + e.right * z2);
  return {tm_coefficient(e.film, k0, e.right, kr), tm_coefficient(e.film, k0, e.left, kl), te_coefficient(k0, kr),
          te_coefficient(k0, kl)};
}

MatsubaraTermResult matsubara_term(const LayeredConfig& config, int l, double quad_tol) {
  const auto t = term_integrals(config, l, false, quad_tol);
  return {l, t.tm, t.te, t.error};
}

ZeroFrequencyTerm zero_frequency_term(const LayeredConfig& config, double quad_tol) {
  config.validate();
  const auto z = zero_integrals(zero_setup(config), false, quad_tol);
  const double half = 0.5 * energy_prefactor(config.thickness, config.temperature);
  return {half * z.tm, half * z.te};
}

FreeEnergyResult free_energy(const LayeredConfig& config, const EngineOptions& options) {
  config.validate();
  check_tolerance(options.tol);
  check_thickness_mode(config, options);
  const double a = config.thickness;
  const double T = config.temperature;
  FreeEnergyResult out;

  if (auto wp = underflow_plasma_frequency(config)) {
    const asymptotics::AsymptoticInput in{a, T, *wp, std::nullopt};
    const LogMagnitude parts[] = {asymptotics::plasma_l0_combined_log(in), asymptotics::plasma_tail_l_ge_1_log(in)};
    out.log_magnitude = log_sum_exp_series(parts);
    out.underflow = true;
    return out;
  }

  const double quad_tol = options.tol / 10.0;
  const auto z = zero_integrals(zero_setup(config), false, quad_tol);
  const double head = 0.5 * (z.tm + z.te);
  auto term = [&](int l) {
    const auto t = term_integrals(config, l, false, quad_tol);
    return t.tm + t.te;
  };
  const auto sum = matsubara_sum(head, term, options.tol, options.threads, kMaxMatsubara);
  require_sum(sum, head, "free energy");

  const double pref = energy_prefactor(a, T);
  out.l0_tm = 0.5 * pref * z.tm;
  out.l0_te = 0.5 * pref * z.te;
  out.tail_l_ge_1 = pref * sum.tail;
  out.value = pref * (head + sum.tail);
  out.log_magnitude = LogMagnitude::from_value(out.value);
  out.l_max_used = sum.l_max;
  out.truncation_error = pref * sum.truncation;
  return out;
}

PressureResult pressure(const LayeredConfig& config, const EngineOptions& options) {
  config.validate();
  check_tolerance(options.tol);
  check_thickness_mode(config, options);
  const double a = config.thickness;
  const double T = config.temperature;
  PressureResult out;
  if (underflow_plasma_frequency(config)) {
    out.underflow = true;
    return out;
  }

  const double quad_tol = options.tol / 10.0;
  const auto z = zero_integrals(zero_setup(config), true, quad_tol);
  const double head = 0.5 * (z.tm + z.te);
  auto term = [&](int l) {
    const auto t = term_integrals(config, l, true, quad_tol);
    return t.tm + t.te;
  };
  const auto sum = matsubara_sum(head, term, options.tol, options.threads, kMaxMatsubara);
  require_sum(sum, head, "pressure");

  const double pref = pressure_prefactor(a, T);
  out.l0 = pref * head;
  out.tail_l_ge_1 = pref * sum.tail;
  out.value = pref * (head + sum.tail);
  out.l_max_used = sum.l_max;
  out.truncation_error = std::fabs(pref) * sum.truncation;
  return out;
}

double nonrelativistic_free_energy(const LayeredConfig& config, const EngineOptions& options) {
  config.validate();
  check_tolerance(options.tol);
  const double head = -0.5 * li3_signed(nonrelativistic_rho_zero(config));
  const double xi1 = first_matsubara_frequency(config.temperature);
  auto term = [&](int l) { return -li3_signed(nonrelativistic_rho(config, l * xi1)); };
  auto sum = matsubara_sum(head, term, options.tol, options.threads, kNonrelativisticSwitch);
  double total = head + sum.tail;
  if (!sum.converged) {
    // Midpoint rule: sum_{l > L} g(l) ~ int_{L + 1/2}^inf g(x) dx.
    const double lower = (sum.l_max + 0.5) * xi1;
    total += nonrelativistic_frequency_integral(config, lower, options.tol / 10.0) / xi1;
  }
  return energy_prefactor(config.thickness, config.temperature) * total;
}

double zero_temperature_energy(const LayeredConfig& config, const EngineOptions& options) {
  config.validate();
  check_tolerance(options.tol);
  const double a = config.thickness;
  const double integral = nonrelativistic_frequency_integral(config, 0.0, options.tol / 10.0);
  return hbar / (16.0 * pi * pi * a * a) * integral;
}

double nonrelativistic_u_integral(double rho, double quad_tol) {
  if (!(rho >= -1.0 && rho <= 1.0)) throw std::domain_error("nonrelativistic_u_integral: |rho| must be <= 1");
  auto f = [rho](double u) { return u * std::log1p(-rho * std::exp(-u)); };
  const quadrature::Tolerance tol{quad_tol, 1e-300, 4000};
  const auto r = quadrature::integrate_half_line(f, {1.0}, tol);
  require_converged(r, quad_tol, "nonrelativistic u integral");
  return r.value;
}

}  // namespace casimir
