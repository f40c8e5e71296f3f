#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "casimir/materials.hpp"
#include "casimir/specfun.hpp"

namespace casimir {

// Film of thickness a with permittivity eps^(0) between two semispaces
// eps^(-1) (left) and eps^(+1) (right) at temperature T.
struct LayeredConfig {
  DielectricModel film;
  DielectricModel plate_left;
  DielectricModel plate_right;
  double thickness = 0.0;    // m
  double temperature = 0.0;  // K

  bool symmetric() const { return plate_left == plate_right; }
  void validate() const;
};

LayeredConfig film_in_vacuum(DielectricModel film, double thickness, double temperature);
LayeredConfig film_between(DielectricModel film, DielectricModel plates, double thickness, double temperature);

// Quadrature or Matsubara-sum failure; carries the achieved error.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double achieved_error)
      : std::runtime_error(what), achieved_error_(achieved_error) {}
  double achieved_error() const { return achieved_error_; }

 private:
  double achieved_error_;
};

struct MatsubaraContext {
  int l = 0;
  double xi = 0.0;    // rad/s, 2 pi k_B T l / hbar
  double zeta = 0.0;  // 2 a xi / c
  std::optional<double> omega_p_tilde;  // 2 a omega_p / c of the film
};

MatsubaraContext matsubara_context(const LayeredConfig& config, int l);

// First Matsubara frequency xi_1 = 2 pi k_B T / hbar.
double first_matsubara_frequency(double temperature);

struct ReflectionCoefficients {
  double tm_plus = 0.0;   // r_TM^(0,+1)
  double tm_minus = 0.0;  // r_TM^(0,-1)
  double te_plus = 0.0;
  double te_minus = 0.0;
};

// Reflection coefficients at the film boundaries for l >= 1 and the
// dimensionless transverse wave number u = 2 a k_perp.
ReflectionCoefficients reflection_coefficients(const LayeredConfig& config, const MatsubaraContext& ctx, double u);

// Dimensionless contributions S_l = int_0^inf u du ln(1 - r r e^{-k0}) of
// the l-th Matsubara term, TM and TE separately.
struct MatsubaraTermResult {
  int l = 0;
  double tm = 0.0;
  double te = 0.0;
  double quad_error = 0.0;
};

MatsubaraTermResult matsubara_term(const LayeredConfig& config, int l, double quad_tol);

// Half-weighted l = 0 free energy, split by polarization (J/m^2).
struct ZeroFrequencyTerm {
  double tm = 0.0;
  double te = 0.0;
};

ZeroFrequencyTerm zero_frequency_term(const LayeredConfig& config, double quad_tol = 1e-11);

struct EngineOptions {
  double tol = 1e-6;       // relative, in (0, 1e-2]
  bool log_space = false;  // allow a > 50 um; result carried by log_magnitude
  int threads = 0;         // 0: hardware concurrency
};

struct FreeEnergyResult {
  double value = 0.0;  // J/m^2
  LogMagnitude log_magnitude;
  double l0_tm = 0.0;
  double l0_te = 0.0;
  double tail_l_ge_1 = 0.0;
  int l_max_used = 0;
  double truncation_error = 0.0;
  // Plasma-type film with omega_p_tilde > 600: value is 0 and the magnitude
  // lives only in log_magnitude.
  bool underflow = false;
};

struct PressureResult {
  double value = 0.0;  // Pa
  double l0 = 0.0;
  double tail_l_ge_1 = 0.0;
  int l_max_used = 0;
  double truncation_error = 0.0;
  bool underflow = false;
};

FreeEnergyResult free_energy(const LayeredConfig& config, const EngineOptions& options = {});
PressureResult pressure(const LayeredConfig& config, const EngineOptions& options = {});

// TE dropped and r_TM = (eps_p - eps_f) / (eps_p + eps_f) independent of u.
double nonrelativistic_free_energy(const LayeredConfig& config, const EngineOptions& options = {});

// Nonrelativistic energy with the Matsubara sum replaced by a frequency
// integral; independent of T except through gamma(T).
double zero_temperature_energy(const LayeredConfig& config, const EngineOptions& options = {});

// int_0^inf u ln(1 - rho e^{-u}) du by quadrature.
double nonrelativistic_u_integral(double rho, double quad_tol);

}  // namespace casimir
