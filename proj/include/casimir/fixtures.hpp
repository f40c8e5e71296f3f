#pragma once

#include <string>
#include <vector>

namespace casimir::run {

enum class Check {
  relative,     // |measured / expected - 1| <= tolerance
  absolute,     // |measured - expected| <= tolerance
  factor,       // max(m/e, e/m) <= tolerance
  upper_bound,  // measured <= expected
  lower_bound,  // measured >= expected
  sig_figs,     // measured and expected agree when rounded to `tolerance` digits
};

struct FixtureOutcome {
  std::string name;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  Check check = Check::relative;
  std::string model;  // permittivity models behind the number
  bool pass = false;
  std::string error;
};

std::string to_string(Check c);
bool evaluate_check(Check check, double measured, double expected, double tolerance);

// Regression table of the published numbers with their tolerances.
std::vector<FixtureOutcome> run_fixtures(int threads = 0);

}  // namespace casimir::run
