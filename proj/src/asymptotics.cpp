#include "casimir/asymptotics.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "casimir/constants.hpp"
#include "casimir/quadrature.hpp"

namespace casimir::asymptotics {

namespace {

using constants::boltzmann;
using constants::hbar;
using constants::pi;
using constants::speed_of_light;

void check_geometry(double a, double T) {
  if (!(a > 0.0)) throw std::domain_error("asymptotics: a must be > 0");
  if (!(T > 0.0)) throw std::domain_error("asymptotics: T must be > 0");
}

double plasma_tilde(const AsymptoticInput& in, double minimum, const char* what) {
  check_geometry(in.a, in.T);
  if (!in.omega_p || !(*in.omega_p > 0.0)) throw std::domain_error(std::string(what) + ": omega_p required");
  const double w = in.omega_p_tilde();
  if (!(w >= minimum)) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s: omega_p_tilde = %.6g outside the validity domain (>= %g)", what, w, minimum);
    throw std::domain_error(buf);
  }
  return w;
}

// ln(k_B T / (denominator a^power))
double ln_prefactor(double a, double T, double denominator, int power) {
  return std::log(boltzmann * T / denominator) - power * std::log(a);
}

// e^w Li_n(e^-w) = sum_j e^{-(j-1) w} / j^n
double scaled_polylog_exp(int n, double w) {
  if (w < 2.0) return std::exp(w) * polylog_exp(n, w);
  const double q = std::exp(-w);
  double sum = 0.0;
  double qp = 1.0;
  for (int j = 1; j < 200; ++j) {
    const double t = qp / std::pow(static_cast<double>(j), n);
    sum += t;
    if (t < 1e-17 * sum) break;
    qp *= q;
  }
  return sum;
}

// ln(1 - y) / y, finite at y = 0
double log1m_over(double y) {
  if (y < 1e-8) return -1.0 - 0.5 * y;
  return std::log1p(-y) / y;
}

// Negative-valued scaled bracket with e^-w removed: value = -prefactor * b * e^-w.
LogMagnitude assemble(double ln_pref, double bracket, double w) {
  if (bracket == 0.0) return LogMagnitude::zero();
  return LogMagnitude::from_ln(ln_pref + std::log(std::fabs(bracket)) - w, bracket > 0.0 ? -1 : 1);
}

}  // namespace

double AsymptoticInput::omega_p_tilde() const {
  if (!omega_p) throw std::domain_error("asymptotics: omega_p required");
  return 2.0 * a * *omega_p / speed_of_light;
}

double AsymptoticInput::zeta1() const { return 4.0 * pi * a * boltzmann * T / (hbar * speed_of_light); }

double AsymptoticInput::gamma_tilde() const {
  if (!gamma) throw std::domain_error("asymptotics: gamma required");
  return 2.0 * a * *gamma / speed_of_light;
}

double classical_drude_free_energy(double a, double T) {
  check_geometry(a, T);
  return -boltzmann * T * zeta3() / (16.0 * pi * a * a);
}

LogMagnitude classical_drude_free_energy_log(double a, double T) {
  check_geometry(a, T);
  return LogMagnitude::from_ln(ln_prefactor(a, T, 16.0 * pi, 2) + std::log(zeta3()), -1);
}

double classical_drude_pressure(double a, double T) {
  check_geometry(a, T);
  return -boltzmann * T * zeta3() / (8.0 * pi * a * a * a);
}

LogMagnitude classical_drude_pressure_log(double a, double T) {
  check_geometry(a, T);
  return LogMagnitude::from_ln(ln_prefactor(a, T, 8.0 * pi, 3) + std::log(zeta3()), -1);
}

double scaled_l0_tm_integral(double w) {
  if (!(w >= 0.0)) throw std::domain_error("scaled_l0_tm_integral: omega_p_tilde must be >= 0");
  return -(w * scaled_polylog_exp(2, w) + scaled_polylog_exp(3, w));
}

double scaled_l0_te_integral(double w) {
  if (!(w > 0.0)) throw std::domain_error("scaled_l0_te_integral: omega_p_tilde must be > 0");
  auto f = [w](double u) {
    const double k = std::hypot(u, w);
    const double s = k + u;
    const double r = w * w / (s * s);
    const double excess = u * u / (k + w);  // k - w
    const double y = r * r * std::exp(-k);
    return u * log1m_over(y) * r * r * std::exp(-excess);
  };
  const quadrature::Tolerance tol{1e-13, 1e-300, 4000};
  const auto r = quadrature::integrate_half_line(f, {std::sqrt(w), w, 4.0 * w}, tol);
  if (!r.converged && r.abs_error > 1e-10 * std::fabs(r.value)) {
    throw std::runtime_error("scaled_l0_te_integral: quadrature did not converge");
  }
  return r.value;
}

LogMagnitude plasma_l0_tm_log(const AsymptoticInput& in) {
  const double w = plasma_tilde(in, 0.0, "plasma_l0_tm");
  return assemble(ln_prefactor(in.a, in.T, 16.0 * pi, 2), -scaled_l0_tm_integral(w), w);
}

double plasma_l0_tm(const AsymptoticInput& in) { return plasma_l0_tm_log(in).to_value(); }

LogMagnitude plasma_l0_te_log(const AsymptoticInput& in, TeVariant variant) {
  const double ln_pref = ln_prefactor(in.a, in.T, 16.0 * pi, 2);
  switch (variant) {
    case TeVariant::exact: {
      const double w = plasma_tilde(in, 0.0, "plasma_l0_te");
      return assemble(ln_pref, -scaled_l0_te_integral(w), w);
    }
    case TeVariant::bessel_expansion: {
      const double w = plasma_tilde(in, kExpansionMinOmegaTilde, "plasma_l0_te");
      const double b = w - 4.0 * w * bessel_k2_scaled(w) + (17.0 - 48.0 / w + 48.0 / (w * w));
      return assemble(ln_pref, b, w);
    }
    case TeVariant::leading_order: {
      const double w = plasma_tilde(in, kExpansionMinOmegaTilde, "plasma_l0_te");
      const double b = w * (1.0 - std::sqrt(8.0 * pi / w) + 17.0 / w);
      return assemble(ln_pref, b, w);
    }
  }
  throw std::invalid_argument("plasma_l0_te: unknown variant");
}

double plasma_l0_te(const AsymptoticInput& in, TeVariant variant) { return plasma_l0_te_log(in, variant).to_value(); }

LogMagnitude plasma_l0_combined_log(const AsymptoticInput& in) {
  const double w = plasma_tilde(in, kExpansionMinOmegaTilde, "plasma_l0_combined");
  return assemble(ln_prefactor(in.a, in.T, 8.0 * pi, 2), w, w);
}

double plasma_l0_combined(const AsymptoticInput& in) { return plasma_l0_combined_log(in).to_value(); }

double gaussian_matsubara_sum(double zeta1, double w) {
  if (!(zeta1 > 0.0) || !(w > 0.0)) throw std::domain_error("gaussian_matsubara_sum: arguments must be > 0");
  const double alpha = zeta1 * zeta1 / (2.0 * w);
  if (alpha < 0.5) {
    // theta-function inversion: sum_{l>=1} e^{-alpha l^2}
    //   = (sqrt(pi/alpha) - 1)/2 + sqrt(pi/alpha) sum_{k>=1} e^{-pi^2 k^2 / alpha}
    const double root = std::sqrt(pi / alpha);
    double dual = 0.0;
    for (int k = 1; k < 50; ++k) {
      const double t = std::exp(-pi * pi * k * k / alpha);
      dual += t;
      if (t < 1e-17) break;
    }
    return 0.5 * (root - 1.0) + root * dual;
  }
  double sum = 0.0;
  for (int l = 1;; ++l) {
    const double t = std::exp(-alpha * l * l);
    sum += t;
    if (t < 1e-16 * sum) break;
  }
  return sum;
}

LogMagnitude plasma_tail_l_ge_1_log(const AsymptoticInput& in) {
  const double w = plasma_tilde(in, kTailMinOmegaTilde, "plasma_tail_l_ge_1");
  const double s = gaussian_matsubara_sum(in.zeta1(), w);
  return assemble(ln_prefactor(in.a, in.T, 4.0 * pi, 2), w * s, w);
}

double plasma_tail_l_ge_1(const AsymptoticInput& in) { return plasma_tail_l_ge_1_log(in).to_value(); }

double drude_bound_fraction(const AsymptoticInput& in, BoundConstant constant) {
  if (constant == BoundConstant::fixed) return 0.82;
  return 1.0 / (1.0 + in.gamma_tilde() / in.zeta1());
}

double drude_tail_bound(const AsymptoticInput& in, BoundConstant constant) {
  const double w = plasma_tilde(in, kExpansionMinOmegaTilde, "drude_tail_bound");
  if (!in.gamma || !(*in.gamma > 0.0)) throw std::domain_error("drude_tail_bound: gamma required");
  const double frac = drude_bound_fraction(in, constant);
  const double z1 = in.zeta1();
  const double w2 = w * w;
  double sum = 0.0;
  for (int l = 1; l < 1000000; ++l) {
    const double z2 = (l * z1) * (l * z1);
    const double s = std::sqrt(z2 + frac * w2);
    const double t = polylog_exp(3, s) + std::sqrt(z2 + w2) * polylog_exp(2, s);
    sum += t;
    if (t < 1e-16 * sum) break;
  }
  return 2.0 * sum;
}

double ideal_metal_limits(Approach approach, double a, double T) {
  check_geometry(a, T);
  return approach == Approach::drude ? classical_drude_free_energy(a, T) : 0.0;
}

LogMagnitude plasma_l0_pressure_log(const AsymptoticInput& in) {
  const double w = plasma_tilde(in, kExpansionMinOmegaTilde, "plasma_l0_pressure");
  return assemble(ln_prefactor(in.a, in.T, 8.0 * pi, 3), w * w, w);
}

double plasma_l0_pressure(const AsymptoticInput& in) { return plasma_l0_pressure_log(in).to_value(); }

}  // namespace casimir::asymptotics
