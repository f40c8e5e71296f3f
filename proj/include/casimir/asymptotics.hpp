#pragma once

#include <optional>

#include "casimir/specfun.hpp"

namespace casimir::asymptotics {

// Dimensionless parameters of the closed forms. omega_p and gamma are in
// rad/s; gamma is the relaxation at temperature T.
struct AsymptoticInput {
  double a = 0.0;  // m
  double T = 0.0;  // K
  std::optional<double> omega_p;
  std::optional<double> gamma;

  // 2 a omega_p / c
  double omega_p_tilde() const;
  // 4 pi a k_B T / (hbar c)
  double zeta1() const;
  // 2 a gamma / c
  double gamma_tilde() const;
};

// Validity thresholds, enforced with std::domain_error.
inline constexpr double kExpansionMinOmegaTilde = 5.0;
inline constexpr double kTailMinOmegaTilde = 91.0;

// -k_B T zeta(3) / (16 pi a^2)
double classical_drude_free_energy(double a, double T);
LogMagnitude classical_drude_free_energy_log(double a, double T);

// -k_B T zeta(3) / (8 pi a^3)
double classical_drude_pressure(double a, double T);
LogMagnitude classical_drude_pressure_log(double a, double T);

// Plasma film, l = 0, TM: -(k_B T / (16 pi a^2)) [w Li2(e^-w) + Li3(e^-w)].
double plasma_l0_tm(const AsymptoticInput& in);
LogMagnitude plasma_l0_tm_log(const AsymptoticInput& in);

enum class TeVariant {
  exact,             // quadrature over u with r_TE = (k - u)/(k + u)
  bessel_expansion,  // K2 form with polynomial correction, w >= 5
  leading_order,     // w (1 - sqrt(8 pi / w) + 17 / w) e^-w, w >= 5
};

double plasma_l0_te(const AsymptoticInput& in, TeVariant variant = TeVariant::exact);
LogMagnitude plasma_l0_te_log(const AsymptoticInput& in, TeVariant variant = TeVariant::exact);

// Leading TM + TE term, -(k_B T / (8 pi a^2)) w e^-w; w >= 5.
double plasma_l0_combined(const AsymptoticInput& in);
LogMagnitude plasma_l0_combined_log(const AsymptoticInput& in);

// Leading l >= 1 plasma contribution,
// -(k_B T / (4 pi a^2)) w e^-w sum_l exp(-zeta_l^2 / (2 w)); w >= 91.
double plasma_tail_l_ge_1(const AsymptoticInput& in);
LogMagnitude plasma_tail_l_ge_1_log(const AsymptoticInput& in);

// sum_{l >= 1} exp(-zeta_l^2 / (2 w)), truncated below 1e-16 of the partial sum.
double gaussian_matsubara_sum(double zeta1, double omega_p_tilde);

enum class BoundConstant {
  fixed,        // 0.82, the Au value at 300 K
  generalized,  // min_l l / (l + gamma_tilde / zeta_1) from the actual gamma
};

// Bound on |S^(l>=1)| for a Drude film relative to the l = 0 normalization;
// needs omega_p and gamma, w >= 5.
double drude_tail_bound(const AsymptoticInput& in, BoundConstant constant = BoundConstant::generalized);
// The factor multiplying w^2 inside the bound exponent.
double drude_bound_fraction(const AsymptoticInput& in, BoundConstant constant);

enum class Approach { drude, plasma };

// omega_p -> infinity: Drude keeps the classical term, plasma vanishes.
double ideal_metal_limits(Approach approach, double a, double T);

// -(k_B T / (8 pi a^3)) w^2 e^-w; w >= 5.
double plasma_l0_pressure(const AsymptoticInput& in);
LogMagnitude plasma_l0_pressure_log(const AsymptoticInput& in);

// Same integrals as TeVariant::exact for a vacuum-bounded plasma film,
// returned as the dimensionless S (without the k_B T / (16 pi a^2) factor)
// scaled by e^w so it stays representable at any w.
double scaled_l0_te_integral(double omega_p_tilde);
double scaled_l0_tm_integral(double omega_p_tilde);

}  // namespace casimir::asymptotics
