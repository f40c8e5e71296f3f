#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include "casimir/constants.hpp"
#include "casimir/lifshitz.hpp"
#include "casimir/materials.hpp"
#include "support.hpp"

using namespace casimir;
using casimir::testing::rel;
using casimir::testing::synthetic_drude_table;

namespace {

RelaxationLaw constant_gamma(double gamma) { return RelaxationLaw{gamma, 165.0, 4.2, 300.0}; }

}  // namespace

TEST_CASE("closed-form permittivities") {
  CHECK(rel(evaluate(sapphire(), 0.0, 300.0), 10.102) < 1e-12);
  const PlasmaModel p = gold_plasma();
  CHECK(evaluate(p, p.plasma_frequency, 300.0) == 2.0);
  CHECK(evaluate(VacuumModel{}, 1e15, 300.0) == 1.0);

  const DrudeModel d = gold_drude();
  const double xi1 = first_matsubara_frequency(300.0);
  const double gamma = relaxation(d.relaxation, 300.0);
  CHECK(std::fabs(gamma / xi1 - 0.21) <= 0.01);
  const double expect = 1.0 + d.plasma_frequency * d.plasma_frequency / (xi1 * (xi1 + gamma));
  CHECK(rel(evaluate(d, xi1, 300.0), expect) < 1e-15);
}

TEST_CASE("poles at zero frequency and negative frequencies are rejected") {
  CHECK_THROWS_AS(evaluate(gold_drude(), 0.0, 300.0), std::domain_error);
  CHECK_THROWS_AS(evaluate(gold_plasma(), 0.0, 300.0), std::domain_error);
  CHECK_THROWS_AS(evaluate(VacuumModel{}, -1.0, 300.0), std::domain_error);
  CHECK_THROWS_AS(validate(PlasmaModel{-1.0}), std::invalid_argument);
  CHECK_THROWS_AS(validate(OscillatorModel{{{-1.0, 1e14}}}), std::invalid_argument);
  CHECK_THROWS_AS(validate(OscillatorModel{{{1.0, 0.0}}}), std::invalid_argument);
}

TEST_CASE("relaxation law") {
  const RelaxationLaw law = gold_drude().relaxation;
  CHECK(rel(relaxation(law, 300.0), constants::ev(0.035)) < 1e-15);
  CHECK(rel(relaxation(law, 300.0), 5.32e13) < 1e-3);
  CHECK(rel(relaxation(law, 150.0), constants::ev(0.0175)) < 1e-14);
  const double g20 = 0.035 * (41.25 / 300.0) * std::pow(20.0 / 41.25, 5);
  CHECK(rel(constants::to_ev(relaxation(law, 20.0)), g20) < 1e-13);
  CHECK(rel(constants::to_ev(relaxation(law, 20.0)), 1.2895e-4) < 1e-4);
  CHECK_THROWS_AS(relaxation(law, 0.0), std::domain_error);
  CHECK_THROWS_AS(relaxation(law, -5.0), std::domain_error);
}

TEST_CASE("relaxation is continuous at both crossovers and positive") {
  const RelaxationLaw law = gold_drude().relaxation;
  for (double tc : {law.debye_temperature / 4.0, law.helium_crossover}) {
    const double below = relaxation(law, std::nextafter(tc, 0.0));
    const double above = relaxation(law, std::nextafter(tc, 1e9));
    CHECK(std::fabs(below - above) / relaxation(law, tc) < 1e-12);
  }
  double prev = 0.0;
  for (double T = 0.05; T < 2000.0; T *= 1.1) {
    const double g = relaxation(law, T);
    CHECK(g > prev);
    prev = g;
  }
}

TEST_CASE("passivity and monotone decrease on random models") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> lg(-2.0, 2.0);
  auto scale = [&](double base) { return base * std::pow(10.0, lg(rng)); };
  for (int trial = 0; trial < 60; ++trial) {
    DielectricModel model;
    switch (trial % 3) {
      case 0: model = DrudeModel{scale(1e16), constant_gamma(scale(5e13))}; break;
      case 1: model = PlasmaModel{scale(1e16)}; break;
      default:
        model = OscillatorModel{{{scale(1.0), scale(1e14)}, {scale(1.0), scale(1e16)}}};
        break;
    }
    double prev = std::numeric_limits<double>::infinity();
    for (double xi = 1e10; xi < 1e20; xi *= 1.6) {
      const double e = evaluate(model, xi, 300.0);
      CHECK(e >= 1.0);
      CHECK(e <= prev);
      prev = e;
    }
  }
}

TEST_CASE("Drude tends to plasma as gamma vanishes") {
  const double wp = constants::ev(9.0);
  for (double xi = 1e12; xi < 1e19; xi *= 3.0) {
    const DrudeModel d{wp, constant_gamma(1e-8 * xi)};
    const double ed = evaluate(d, xi, 300.0);
    const double ep = evaluate(PlasmaModel{wp}, xi, 300.0);
    CHECK(std::fabs(ed - ep) / ep < 1e-6);
    if (xi >= 0.1 * wp) CHECK(std::fabs(ed - ep) < 1e-6);
  }
}

TEST_CASE("zero-frequency classification") {
  const auto p = zero_frequency_class(gold_plasma());
  REQUIRE(std::holds_alternative<PlasmaLike>(p));
  CHECK(rel(std::get<PlasmaLike>(p).plasma_frequency, constants::ev(9.0)) < 1e-15);

  const auto s = zero_frequency_class(sapphire());
  REQUIRE(std::holds_alternative<FiniteEpsilon>(s));
  CHECK(rel(std::get<FiniteEpsilon>(s).eps0, 10.102) < 1e-12);

  const auto v = zero_frequency_class(VacuumModel{});
  REQUIRE(std::holds_alternative<FiniteEpsilon>(v));
  CHECK(std::get<FiniteEpsilon>(v).eps0 == 1.0);

  CHECK(std::holds_alternative<DrudeLike>(zero_frequency_class(gold_drude())));

  auto table = synthetic_drude_table(constants::ev(9.0), constants::ev(0.035));
  const DrudeModel d = gold_drude();
  CHECK(std::holds_alternative<DrudeLike>(
      zero_frequency_class(TabulatedModel{table, DrudeTail{d.plasma_frequency, d.relaxation}})));
  CHECK(std::holds_alternative<PlasmaLike>(zero_frequency_class(TabulatedModel{table, PlasmaTail{d.plasma_frequency, std::nullopt}})));
}

TEST_CASE("Kramers-Kronig transform of synthetic Drude data") {
  const DrudeModel d = gold_drude();
  const double gamma = relaxation(d.relaxation, 300.0);
  auto table = synthetic_drude_table(d.plasma_frequency, gamma);
  const Extrapolation tail = DrudeTail{d.plasma_frequency, d.relaxation};
  const double xi1 = first_matsubara_frequency(300.0);
  for (double f = 1.0; f <= 100.0 * (1 + 1e-12); f *= std::pow(100.0, 1.0 / 20.0)) {
    const double xi = f * xi1;
    CHECK_MESSAGE(rel(kk_transform(*table, tail, xi, 300.0), evaluate(d, xi, 300.0)) < 5e-3, "xi/xi1=" << f);
  }
  CHECK_THROWS_AS(kk_transform(*table, tail, 0.0, 300.0), std::domain_error);

  // High-frequency transparency.
  CHECK(kk_transform(*table, tail, 1e3 * table->omega_max(), 300.0) - 1.0 < 1e-4);

  // Tabulated model goes through the same transform and caches.
  const TabulatedModel model{table, tail};
  const double first = evaluate(model, 3.0 * xi1, 300.0);
  CHECK(evaluate(model, 3.0 * xi1, 300.0) == first);
  CHECK(rel(first, kk_transform(*table, tail, 3.0 * xi1, 300.0)) < 1e-15);
}

TEST_CASE("Kramers-Kronig with a lossless table reduces to the plasma term") {
  const double wp = constants::ev(9.0);
  const OpticalTable lossless({{constants::ev(0.1), 1.0, 0.0}, {constants::ev(10.0), 1.0, 0.0}});
  for (double xi : {1e13, 1e14, 1e15, 1e16, 1e17}) {
    CHECK(rel(kk_transform(lossless, PlasmaTail{wp, std::nullopt}, xi, 300.0), 1.0 + wp * wp / (xi * xi)) < 1e-12);
  }
}

TEST_CASE("optical table validation and parsing") {
  CHECK_THROWS_AS(OpticalTable({{1.0, 1.0, 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(OpticalTable({{2.0, 1.0, 0.0}, {1.0, 1.0, 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(OpticalTable({{1.0, 0.0, 0.0}, {2.0, 1.0, 0.0}}), std::invalid_argument);

  std::istringstream good("# omega_eV n k\n0.1 10 50\n\n1.0 1.5 5.0\n2.0 0.5 3.0\n");
  const OpticalTable t = parse_optical_table(good, "good.txt");
  REQUIRE(t.samples().size() == 3);
  CHECK(rel(t.omega_min(), constants::ev(0.1)) < 1e-15);
  CHECK(rel(t.imag_permittivity(constants::ev(1.0)), 2.0 * 1.5 * 5.0) < 1e-12);
  CHECK(t.imag_permittivity(constants::ev(5.0)) == 0.0);

  auto error_of = [](const std::string& text) {
    std::istringstream in(text);
    try {
      parse_optical_table(in, "data.txt");
    } catch (const std::runtime_error& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(error_of("1.0 1 1\n0.5 1 1\n").find("data.txt:2") != std::string::npos);
  CHECK(error_of("# c\n1.0 -1 1\n2.0 1 1\n").find("data.txt:2") != std::string::npos);
  CHECK(error_of("1.0 1\n").find("data.txt:1") != std::string::npos);
  CHECK_FALSE(error_of("1.0 1 1\n").empty());
  CHECK_THROWS(load_optical_table("/nonexistent/table.txt"));
}

TEST_CASE("plasma frequency lookup and descriptions") {
  CHECK(rel(*plasma_frequency(gold_drude()), constants::ev(9.0)) < 1e-15);
  CHECK_FALSE(plasma_frequency(sapphire()).has_value());
  CHECK(describe(gold_drude()).find("drude") != std::string::npos);
  CHECK(describe(sapphire()).find("oscillator") != std::string::npos);
}
