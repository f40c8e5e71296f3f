#include "casimir/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace casimir {

// ---------------------------------------------------------------------------
// LogMagnitude
// ---------------------------------------------------------------------------

LogMagnitude LogMagnitude::from_value(double value) {
  if (value == 0.0) return {};
  if (!std::isfinite(value)) {
    throw std::domain_error("LogMagnitude: non-finite value");
  }
  int e = 0;
  const double m = std::frexp(std::fabs(value), &e);
  LogMagnitude out;
  out.mantissa_ = m;
  out.exponent_ = e;
  out.sign_ = value > 0 ? 1 : -1;
  return out;
}

LogMagnitude LogMagnitude::from_log10(double log10_abs, int sign) {
  if (sign == 0) return {};
  return from_ln(log10_abs * std::numbers::ln10, sign);
}

LogMagnitude LogMagnitude::from_ln(double ln_abs, int sign) {
  if (sign == 0) return {};
  if (!std::isfinite(ln_abs)) {
    throw std::domain_error("LogMagnitude: non-finite logarithm");
  }
  const double y = ln_abs / std::numbers::ln2;
  const double fl = std::floor(y);
  LogMagnitude out;
  out.mantissa_ = std::exp2(y - fl - 1.0);  // in [0.5, 1)
  out.exponent_ = static_cast<std::int64_t>(fl) + 1;
  out.sign_ = sign > 0 ? 1 : -1;
  if (out.mantissa_ >= 1.0) {  // rounding at the top of the interval
    out.mantissa_ *= 0.5;
    ++out.exponent_;
  }
  return out;
}

double LogMagnitude::log10_abs() const {
  if (sign_ == 0) return -std::numeric_limits<double>::infinity();
  return std::log10(mantissa_) + static_cast<double>(exponent_) * std::numbers::ln2 / std::numbers::ln10;
}

double LogMagnitude::ln_abs() const {
  if (sign_ == 0) return -std::numeric_limits<double>::infinity();
  return std::log(mantissa_) + static_cast<double>(exponent_) * std::numbers::ln2;
}

double LogMagnitude::to_value() const {
  if (sign_ == 0) return 0.0;
  constexpr std::int64_t lim = 1 << 20;
  const auto e = static_cast<int>(std::clamp<std::int64_t>(exponent_, -lim, lim));
  return sign_ * std::ldexp(mantissa_, e);
}

LogMagnitude LogMagnitude::operator*(const LogMagnitude& other) const {
  if (sign_ == 0 || other.sign_ == 0) return {};
  int e = 0;
  LogMagnitude out;
  out.mantissa_ = std::frexp(mantissa_ * other.mantissa_, &e);
  out.exponent_ = exponent_ + other.exponent_ + e;
  out.sign_ = sign_ * other.sign_;
  return out;
}

LogMagnitude LogMagnitude::operator-() const {
  LogMagnitude out = *this;
  out.sign_ = -sign_;
  return out;
}

LogMagnitude log_sum_exp_series(std::span<const LogMagnitude> terms) {
  int sign = 0;
  double max_ln = -std::numeric_limits<double>::infinity();
  for (const auto& t : terms) {
    if (t.is_zero()) continue;
    if (sign == 0) {
      sign = t.sign();
    } else if (t.sign() != sign) {
      throw std::invalid_argument("log_sum_exp_series: mixed-sign terms");
    }
    max_ln = std::max(max_ln, t.ln_abs());
  }
  if (sign == 0) return LogMagnitude::zero();

  // Neumaier-compensated sum of exp(ln_i - max_ln) in [0, 1].
  double sum = 0.0;
  double comp = 0.0;
  for (const auto& t : terms) {
    if (t.is_zero()) continue;
    const double x = std::exp(t.ln_abs() - max_ln);
    const double s = sum + x;
    comp += std::fabs(sum) >= std::fabs(x) ? (sum - s) + x : (x - s) + sum;
    sum = s;
  }
  return LogMagnitude::from_ln(max_ln + std::log(sum + comp), sign);
}

// ---------------------------------------------------------------------------
// Zeta and polylogarithm
// ---------------------------------------------------------------------------

namespace {

// Even Bernoulli numbers B_0, B_2, ..., B_40.
constexpr std::array<double, 21> kBernoulliEven = {
    1.0,
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
    -7709321041217.0 / 510.0,
    2577687858367.0 / 6.0,
    -26315271553053477373.0 / 1919190.0,
    2929993913841559.0 / 6.0,
    -261082718496449122051.0 / 13530.0,
};

constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

// zeta(s) for integer s <= 0.
double zeta_nonpositive(int s) {
  if (s == 0) return -0.5;
  const int m = -s;
  if (m % 2 == 0) return 0.0;  // trivial zeros
  const int idx = (m + 1) / 2;
  if (idx >= static_cast<int>(kBernoulliEven.size())) {
    throw std::out_of_range("zeta at large negative integer");
  }
  return -kBernoulliEven[idx] / (m + 1);
}

double zeta_any(int s) { return s >= 2 ? riemann_zeta(s) : zeta_nonpositive(s); }

// Li_n(z) = sum z^k / k^n, z in [0, 0.5].
double polylog_series(int n, double z) {
  if (z == 0.0) return 0.0;
  double sum = 0.0;
  double zk = 1.0;
  for (int k = 1; k < 2000; ++k) {
    zk *= z;
    const double term = zk / std::pow(static_cast<double>(k), n);
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

// Li_n(exp(mu)) by the expansion in powers of mu, valid for |mu| < 2 pi.
double polylog_log_series(int n, double mu) {
  if (mu == 0.0) return riemann_zeta(n);
  double sum = 0.0;
  double mu_pow = 1.0;  // mu^k / k!
  double harmonic = 0.0;
  for (int k = 0; k <= n + 39; ++k) {
    if (k > 0) mu_pow *= mu / k;
    if (k == n - 1) {
      for (int j = 1; j <= n - 1; ++j) harmonic += 1.0 / j;
      sum += mu_pow * (harmonic - std::log(-mu));
      continue;
    }
    const double z = zeta_any(n - k);
    if (z == 0.0) continue;
    const double term = z * mu_pow;
    sum += term;
    if (k > n && std::fabs(term) < 1e-18 * std::fabs(sum)) break;
  }
  return sum;
}

}  // namespace

double riemann_zeta(int n) {
  if (n < 2) throw std::domain_error("riemann_zeta: n must be >= 2");
  constexpr int N = 16;
  double sum = 0.0;
  for (int k = N - 1; k >= 1; --k) sum += std::pow(static_cast<double>(k), -n);
  // Euler-Maclaurin tail for sum_{k >= N} k^-n.
  const double dn = n;
  double tail = std::pow(static_cast<double>(N), 1.0 - dn) / (dn - 1.0) + 0.5 * std::pow(static_cast<double>(N), -dn);
  double rising = dn;  // n (n+1) ... (n+2j-2)
  double fact = 2.0;   // (2j)!
  for (int j = 1; j <= 8; ++j) {
    tail += kBernoulliEven[j] / fact * rising * std::pow(static_cast<double>(N), -dn - 2.0 * j + 1.0);
    rising *= (dn + 2.0 * j - 1.0) * (dn + 2.0 * j);
    fact *= (2.0 * j + 1.0) * (2.0 * j + 2.0);
  }
  return sum + tail;
}

double zeta3() { return riemann_zeta(3); }

double polylog(int n, double z) {
  if (n < 2) throw std::domain_error("polylog: order must be >= 2, got " + std::to_string(n));
  if (!(z >= 0.0 && z <= 1.0)) throw std::domain_error("polylog: argument outside [0, 1]");
  if (z == 1.0) return riemann_zeta(n);
  if (z <= 0.5) return polylog_series(n, z);
  return polylog_exp(n, -std::log(z));
}

double polylog_exp(int n, double x) {
  if (n < 2) throw std::domain_error("polylog: order must be >= 2, got " + std::to_string(n));
  if (!(x >= 0.0)) throw std::domain_error("polylog_exp: x must be >= 0");
  if (x >= std::numbers::ln2) return polylog_series(n, std::exp(-x));
  if (n == 2) {
    // Li2(z) + Li2(1 - z) = pi^2/6 - ln z ln(1 - z)
    const double one_minus_z = -std::expm1(-x);
    return std::numbers::pi * std::numbers::pi / 6.0 + x * std::log(one_minus_z) - polylog_series(2, one_minus_z);
  }
  return polylog_log_series(n, -x);
}

// ---------------------------------------------------------------------------
// Modified Bessel functions K_0, K_1, K_2
// ---------------------------------------------------------------------------

namespace {

constexpr double kSeriesLimit = 2.0;
constexpr double kAsymptoticLimit = 700.0;

// Power series from the standard ascending expansions, x <= 2.
double k0_series(double x) {
  const double q = 0.25 * x * x;
  const double lg = std::log(0.5 * x) + kEulerGamma;
  double term = 1.0;  // q^k / (k!)^2
  double harmonic = 0.0;
  double i0 = 1.0;
  double s = 0.0;
  for (int k = 1; k < 60; ++k) {
    term *= q / (static_cast<double>(k) * k);
    harmonic += 1.0 / k;
    i0 += term;
    s += harmonic * term;
    if (term < 1e-18) break;
  }
  return -lg * i0 + s;
}

double k1_series(double x) {
  const double q = 0.25 * x * x;
  const double lhalf = std::log(0.5 * x);
  double term = 1.0;  // q^k / (k! (k+1)!)
  double psi1 = -kEulerGamma;        // psi(k+1)
  double psi2 = 1.0 - kEulerGamma;   // psi(k+2)
  double i1 = 0.0;
  double s = 0.0;
  for (int k = 0; k < 60; ++k) {
    if (k > 0) {
      term *= q / (static_cast<double>(k) * (k + 1));
      psi1 += 1.0 / k;
      psi2 += 1.0 / (k + 1);
    }
    i1 += term;
    s += (psi1 + psi2) * term;
    if (term < 1e-18) break;
  }
  i1 *= 0.5 * x;
  return 1.0 / x + lhalf * i1 - 0.25 * x * s;
}

double k2_series(double x) {
  const double q = 0.25 * x * x;
  const double lhalf = std::log(0.5 * x);
  double term = 0.5;  // q^k / (k! (k+2)!)
  double psi1 = -kEulerGamma;              // psi(k+1)
  double psi3 = 1.5 - kEulerGamma;         // psi(k+3)
  double i2 = 0.0;
  double s = 0.0;
  for (int k = 0; k < 60; ++k) {
    if (k > 0) {
      term *= q / (static_cast<double>(k) * (k + 2));
      psi1 += 1.0 / k;
      psi3 += 1.0 / (k + 2);
    }
    i2 += term;
    s += (psi1 + psi3) * term;
    if (term < 1e-18) break;
  }
  i2 *= q;
  return 2.0 / (x * x) - 0.5 - lhalf * i2 + 0.5 * q * s;
}

// exp(x) K_nu(x) = int_0^inf exp(-x (cosh t - 1)) cosh(nu t) dt by the
// trapezoidal rule, which converges geometrically for this entire integrand.
double k_scaled_integral(int nu, double x) {
  const double h = std::min(0.25, 0.5 / std::sqrt(x));
  double sum = 0.5;
  for (int j = 1; j < 10000; ++j) {
    const double t = j * h;
    const double sh = std::sinh(0.5 * t);
    const double f = std::exp(-2.0 * x * sh * sh) * std::cosh(nu * t);
    sum += f;
    if (f < 1e-18 * sum) break;
  }
  return h * sum;
}

// Large-argument expansion of exp(x) K_nu(x).
double k_scaled_asymptotic(int nu, double x) {
  const double mu = 4.0 * nu * nu;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 60; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = term * (mu - odd * odd) / (k * 8.0 * x);
    if (std::fabs(next) > std::fabs(term)) break;
    term = next;
    sum += term;
    if (std::fabs(term) < 1e-18 * std::fabs(sum)) break;
  }
  return std::sqrt(std::numbers::pi / (2.0 * x)) * sum;
}

double k_scaled(int nu, double x) {
  return x > kAsymptoticLimit ? k_scaled_asymptotic(nu, x) : k_scaled_integral(nu, x);
}

void check_positive(double x, const char* name) {
  if (!(x > 0.0)) throw std::domain_error(std::string(name) + ": argument must be > 0");
}

}  // namespace

double bessel_k0(double x) {
  check_positive(x, "bessel_k0");
  return x < kSeriesLimit ? k0_series(x) : k_scaled(0, x) * std::exp(-x);
}

double bessel_k1(double x) {
  check_positive(x, "bessel_k1");
  return x < kSeriesLimit ? k1_series(x) : k_scaled(1, x) * std::exp(-x);
}

double bessel_k2(double x) {
  check_positive(x, "bessel_k2");
  return x < kSeriesLimit ? k2_series(x) : k_scaled(2, x) * std::exp(-x);
}

double bessel_k2_scaled(double x) {
  check_positive(x, "bessel_k2_scaled");
  return x < kSeriesLimit ? k2_series(x) * std::exp(x) : k_scaled(2, x);
}

LogMagnitude bessel_k2_log(double x) {
  check_positive(x, "bessel_k2_log");
  if (x < kSeriesLimit) return LogMagnitude::from_value(k2_series(x));
  return LogMagnitude::from_ln(std::log(k_scaled(2, x)) - x, 1);
}

}  // namespace casimir
