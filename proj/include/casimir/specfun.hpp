#pragma once

#include <cstdint>
#include <span>

namespace casimir {

// A real number kept as sign * mantissa * 2^exponent with an unbounded
// (64-bit) binary exponent. Values such as exp(-8000) that underflow a
// double are representable; doubles round-trip exactly.
class LogMagnitude {
 public:
  LogMagnitude() = default;

  static LogMagnitude from_value(double value);
  static LogMagnitude from_log10(double log10_abs, int sign);
  // sign * exp(ln_abs)
  static LogMagnitude from_ln(double ln_abs, int sign);
  static LogMagnitude zero() { return {}; }

  int sign() const { return sign_; }
  bool is_zero() const { return sign_ == 0; }
  double log10_abs() const;
  double ln_abs() const;
  // Ordinary double; underflows to (signed) zero or overflows to inf.
  double to_value() const;

  LogMagnitude operator*(const LogMagnitude& other) const;
  LogMagnitude operator*(double factor) const { return *this * from_value(factor); }
  LogMagnitude operator-() const;

 private:
  double mantissa_ = 0.0;  // in [0.5, 1) when nonzero
  std::int64_t exponent_ = 0;
  int sign_ = 0;
};

// Sum of same-signed terms without intermediate underflow or overflow.
// Throws std::invalid_argument on mixed signs (zeros are ignored).
LogMagnitude log_sum_exp_series(std::span<const LogMagnitude> terms);

// Riemann zeta at integer n >= 2.
double riemann_zeta(int n);
double zeta3();

// Li_n(z) for z in [0, 1] and integer n >= 2.
double polylog(int n, double z);
// Li_n(exp(-x)) for x >= 0; avoids the loss of precision in ln(exp(-x)).
double polylog_exp(int n, double x);

// Modified Bessel functions of the second kind, x > 0.
double bessel_k0(double x);
double bessel_k1(double x);
double bessel_k2(double x);
// exp(x) * K2(x)
double bessel_k2_scaled(double x);
LogMagnitude bessel_k2_log(double x);

}  // namespace casimir
