#pragma once

#include <cmath>
#include <complex>
#include <memory>
#include <vector>

#include "casimir/materials.hpp"

namespace casimir::testing {

inline double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

// n + i k = sqrt(1 - omega_p^2 / (omega (omega + i gamma))) on a log grid
// spanning [lo, hi] * gamma.
inline std::shared_ptr<const OpticalTable> synthetic_drude_table(double omega_p, double gamma, double lo = 1e-2,
                                                                 double hi = 1e4, int count = 1200) {
  std::vector<OpticalSample> samples;
  samples.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double w = gamma * lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
    const std::complex<double> eps = 1.0 - omega_p * omega_p / (w * std::complex<double>(w, gamma));
    const std::complex<double> nk = std::sqrt(eps);
    samples.push_back({w, nk.real(), nk.imag()});
  }
  return std::make_shared<const OpticalTable>(std::move(samples));
}

}  // namespace casimir::testing
