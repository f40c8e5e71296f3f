#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace casimir::quadrature {

struct Result {
  double value = 0.0;
  double abs_error = 0.0;
  int evaluations = 0;
  bool converged = true;
};

struct Tolerance {
  double relative = 1e-10;
  double absolute = 0.0;
  int max_intervals = 4000;
};

// Globally adaptive 7/15-point Gauss-Kronrod integration of f over a set of
// consecutive pieces. `breakpoints` must be ascending; the last piece may be
// semi-infinite (pass +infinity as the final breakpoint), in which case it is
// mapped onto [0, 1) by x = b + scale * s / (1 - s).
Result integrate(const std::function<double(double)>& f, std::span<const double> breakpoints,
                 const Tolerance& tol, double tail_scale = 1.0);

inline Result integrate(const std::function<double(double)>& f, double a, double b, const Tolerance& tol) {
  const double pts[] = {a, b};
  return integrate(f, pts, tol);
}

// Integral over [0, inf) split at the given interior breakpoints (any order;
// non-positive and non-finite values are ignored).
Result integrate_half_line(const std::function<double(double)>& f, std::vector<double> interior,
                           const Tolerance& tol, double tail_scale = 1.0);

// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double s = sum_ + x;
    comp_ += std::fabs(sum_) >= std::fabs(x) ? (sum_ - s) + x : (x - s) + sum_;
    sum_ = s;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace casimir::quadrature
