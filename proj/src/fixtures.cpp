#include "casimir/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "casimir/asymptotics.hpp"
#include "casimir/constants.hpp"
#include "casimir/lifshitz.hpp"
#include "casimir/parallel.hpp"
#include "casimir/specfun.hpp"

namespace casimir::run {

namespace {

using constants::nm;
using constants::um;
namespace asy = asymptotics;

constexpr double kRoom = 300.0;

const char* const kPureVacuum = "pure Drude/plasma Au film, vacuum";
const char* const kPureSapphire = "pure Drude/plasma Au film, sapphire plates";

DielectricModel au(bool drude) {
  if (drude) return gold_drude();
  return gold_plasma();
}

LayeredConfig setup(bool drude, bool sapphire_plates, double a, double T) {
  return sapphire_plates ? film_between(au(drude), sapphire(), a, T) : film_in_vacuum(au(drude), a, T);
}

EngineOptions options(double tol = 1e-7) { return {tol, false, 1}; }

double F(bool drude, bool sap, double a, double T = kRoom, double tol = 1e-7) {
  return free_energy(setup(drude, sap, a, T), options(tol)).value;
}

double P(bool drude, bool sap, double a, double T = kRoom, double tol = 1e-7) {
  return pressure(setup(drude, sap, a, T), options(tol)).value;
}

asy::AsymptoticInput au_input(double a, double T = kRoom) {
  const DrudeModel g = gold_drude();
  return {a, T, g.plasma_frequency, relaxation(g.relaxation, T)};
}

double round_sig(double v, int digits) {
  if (v == 0.0) return 0.0;
  const double e = std::floor(std::log10(std::fabs(v)));
  const double scale = std::pow(10.0, digits - 1 - e);
  return std::round(v * scale) / scale;
}

struct Spec {
  std::string name;
  double expected;
  double tolerance;
  Check check;
  std::string model;
  std::function<double()> measure;
  std::function<double()> reference = {};  // engine-computed expected value, when set
};

std::vector<Spec> specs() {
  std::vector<Spec> s;

  s.push_back({"gamma_over_xi1_300K", 0.21, 0.01, Check::absolute, "Drude Au", [] {
                 const DrudeModel g = gold_drude();
                 return relaxation(g.relaxation, kRoom) / first_matsubara_frequency(kRoom);
               }});
  s.push_back({"gamma_room_eV", 0.035, 1e-12, Check::relative, "Drude Au", [] {
                 return constants::to_ev(relaxation(gold_drude().relaxation, kRoom));
               }});
  s.push_back({"penetration_depth_nm", 22.0, 0.05, Check::relative, "Au omega_p = 9 eV",
               [] { return constants::speed_of_light / gold_plasma().plasma_frequency / nm; }});
  s.push_back({"zeta3_half", 0.601, 1e-3, Check::relative, "-", [] { return zeta3() / 2.0; }});

  // Ideal-metal reflection limits of a plasma film with a huge omega_p.
  auto ideal = [](bool tm) {
    const LayeredConfig c = film_in_vacuum(PlasmaModel{constants::ev(9.0e4)}, 100 * nm, kRoom);
    const auto r = reflection_coefficients(c, matsubara_context(c, 1), 1.0);
    return tm ? r.tm_plus : r.te_plus;
  };
  s.push_back({"ideal_reflection_tm", -1.0, 1e-3, Check::absolute, "plasma omega_p = 9e4 eV, vacuum",
               [ideal] { return ideal(true); }});
  s.push_back({"ideal_reflection_te", 1.0, 1e-3, Check::absolute, "plasma omega_p = 9e4 eV, vacuum",
               [ideal] { return ideal(false); }});

  s.push_back({"l0_te_bessel_expansion_over_exact_110nm", 1.0, 0.01, Check::relative, "plasma Au, vacuum", [] {
                 const auto in = au_input(110 * nm);
                 return asy::plasma_l0_te(in, asy::TeVariant::bessel_expansion) / asy::plasma_l0_te(in);
               }});
  s.push_back({"l0_te_leading_over_exact_110nm", 1.0, 0.05, Check::relative, "plasma Au, vacuum", [] {
                 const auto in = au_input(110 * nm);
                 return asy::plasma_l0_te(in, asy::TeVariant::leading_order) / asy::plasma_l0_te(in);
               }});
  s.push_back({"l0_tm_leading_share_of_combined", 1.0, 0.01, Check::relative, "plasma, omega_p_tilde = 1000", [] {
                 const double wp = gold_plasma().plasma_frequency;
                 const double a = 1000.0 * constants::speed_of_light / (2.0 * wp);
                 const asy::AsymptoticInput in{a, kRoom, wp, std::nullopt};
                 const auto tm = asy::plasma_l0_tm_log(in);
                 const auto comb = asy::plasma_l0_combined_log(in);
                 return 2.0 * std::exp(tm.ln_abs() - comb.ln_abs());
               }});

  const double tail_a[] = {6 * um, 30 * um, 50 * um, 100 * um};
  const double tail_ratio[] = {4.95, 1.66, 1.06, 0.46};
  const char* tail_name[] = {"6um", "30um", "50um", "100um"};
  for (int i = 0; i < 4; ++i) {
    const double a = tail_a[i];
    s.push_back({std::string("plasma_tail_over_l0_") + tail_name[i], tail_ratio[i], 0.05, Check::relative,
                 "plasma Au asymptotics", [a] {
                   const auto in = au_input(a);
                   return std::exp(asy::plasma_tail_l_ge_1_log(in).ln_abs() -
                                   asy::plasma_l0_combined_log(in).ln_abs());
                 }});
  }
  s.push_back({"engine_tail_over_l0_6um", 4.95, 0.05, Check::relative, "plasma Au film, vacuum", [] {
                 const auto r = free_energy(setup(false, false, 6 * um, kRoom), options(1e-8));
                 return r.tail_l_ge_1 / (r.l0_tm + r.l0_te);
               }});
  s.push_back({"log10_exp_minus_omega_tilde_100um", std::log10(2.5) - 3566.0, 0.05, Check::relative,
               "Au omega_p = 9 eV", [] { return -au_input(100 * um).omega_p_tilde() / std::log(10.0); }});

  const double bound_a[] = {110 * nm, 120 * nm, 150 * nm};
  const double bound_v[] = {0.058, 0.026, 0.0024};
  const double bound_tol[] = {0.02, 0.02, 0.05};
  const char* bound_name[] = {"110nm", "120nm", "150nm"};
  for (int i = 0; i < 3; ++i) {
    const double a = bound_a[i];
    s.push_back({std::string("drude_tail_bound_") + bound_name[i], bound_v[i], bound_tol[i], Check::relative,
                 "Drude Au", [a] { return asy::drude_tail_bound(au_input(a)); }});
  }
  s.push_back({"drude_classicality_150nm", 0.0, 0.0, Check::upper_bound, "Drude Au film, vacuum", [] {
                 // measured - allowed <= 0
                 const auto r = free_energy(setup(true, false, 150 * nm, kRoom), options());
                 const double frac = std::fabs(r.tail_l_ge_1 / r.l0_tm);
                 return frac - asy::drude_tail_bound(au_input(150 * nm)) / (zeta3() / 2.0);
               }});

  s.push_back({"ideal_plasma_limit", 0.0, 0.0, Check::absolute, "plasma, omega_p -> infinity",
               [] { return asy::ideal_metal_limits(asy::Approach::plasma, 100 * nm, kRoom); }});
  s.push_back({"classical_pressure_linear_T_55nm", 2.0, 1e-12, Check::relative, "Drude l = 0", [] {
                 return asy::classical_drude_pressure(55 * nm, 200.0) / asy::classical_drude_pressure(55 * nm, 100.0);
               }});

  for (bool sap : {false, true}) {
    const std::string tag = sap ? "sapphire" : "vacuum";
    const std::string model = sap ? kPureSapphire : kPureVacuum;
    s.push_back({"drude_plasma_agree_10nm_" + tag, 1.0, 0.05, Check::relative, model,
                 [sap] { return F(true, sap, 10 * nm) / F(false, sap, 10 * nm); }});
  }
  s.push_back({"drude_vacuum_vs_sapphire_180nm", 0.0, 4, Check::sig_figs, kPureSapphire,
               [] { return F(true, false, 180 * nm); }, [] { return F(true, true, 180 * nm); }});

  const double ratio_a[] = {50 * nm, 100 * nm, 200 * nm};
  const double ratio_sap[] = {1.97, 61.9, 3.6e5};
  const double ratio_vac[] = {1.72, 50.45, 3.17e5};
  const double ratio_tol[] = {0.3, 0.3, 2.0};
  const Check ratio_check[] = {Check::relative, Check::relative, Check::factor};
  for (int i = 0; i < 3; ++i) {
    const double a = ratio_a[i];
    const std::string an = std::to_string(static_cast<int>(std::lround(a / nm))) + "nm";
    s.push_back({"ratio_F_sapphire_" + an, ratio_sap[i], ratio_tol[i], ratio_check[i], kPureSapphire,
                 [a] { return F(true, true, a) / F(false, true, a); }});
    s.push_back({"ratio_F_vacuum_" + an, ratio_vac[i], ratio_tol[i], ratio_check[i], kPureVacuum,
                 [a] { return F(true, false, a) / F(false, false, a); }});
  }
  s.push_back({"F_plasma_sapphire_50nm_nJ", -42.95, 0.3, Check::relative, kPureSapphire,
               [] { return F(false, true, 50 * nm) / 1e-9; }});
  s.push_back({"F_plasma_sapphire_100nm_nJ", -0.1633, 0.3, Check::relative, kPureSapphire,
               [] { return F(false, true, 100 * nm) / 1e-9; }});
  s.push_back({"F_plasma_vacuum_50nm_nJ", -58.60, 0.3, Check::relative, kPureVacuum,
               [] { return F(false, false, 50 * nm) / 1e-9; }});
  s.push_back({"F_plasma_vacuum_100nm_nJ", -0.2012, 0.3, Check::relative, kPureVacuum,
               [] { return F(false, false, 100 * nm) / 1e-9; }});
  s.push_back({"plasma_vacuum_over_sandwich_100nm", 1.23, 0.1, Check::relative, kPureSapphire,
               [] { return F(false, false, 100 * nm) / F(false, true, 100 * nm); }});
  s.push_back({"plasma_vacuum_over_sandwich_200nm", 1.15, 0.1, Check::relative, kPureSapphire,
               [] { return F(false, false, 200 * nm) / F(false, true, 200 * nm); }});

  s.push_back({"P_plasma_vacuum_50nm_Pa", 7.318, 0.3, Check::relative, kPureVacuum,
               [] { return std::fabs(P(false, false, 50 * nm)); }});
  s.push_back({"P_plasma_vacuum_100nm_Pa", 0.0245, 0.3, Check::relative, kPureVacuum,
               [] { return std::fabs(P(false, false, 100 * nm)); }});
  s.push_back({"P_plasma_sapphire_100nm_Pa", 0.017, 0.3, Check::relative, kPureSapphire,
               [] { return std::fabs(P(false, true, 100 * nm)); }});
  s.push_back({"P_plasma_sapphire_100nm_over_l0", 5.0, 0.0, Check::lower_bound, kPureSapphire, [] {
                 return std::fabs(P(false, true, 100 * nm) / asy::plasma_l0_pressure(au_input(100 * nm)));
               }});
  s.push_back({"ratio_P_vacuum_50nm", 1.24, 0.2, Check::relative, kPureVacuum,
               [] { return P(true, false, 50 * nm) / P(false, false, 50 * nm); }});
  s.push_back({"ratio_P_sapphire_50nm", 1.33, 0.2, Check::relative, kPureSapphire,
               [] { return P(true, true, 50 * nm) / P(false, true, 50 * nm); }});

  s.push_back({"drude_T_ratio_200nm", 3.9, 0.02, Check::relative, kPureVacuum,
               [] { return F(true, false, 200 * nm, 300.0) / F(true, false, 200 * nm, 77.0); }});
  s.push_back({"drude_T_monotone_55nm", 1.0, 0.0, Check::lower_bound, kPureVacuum,
               [] { return F(true, false, 55 * nm, 300.0) / F(true, false, 55 * nm, 77.0); }});
  for (bool sap : {false, true}) {
    s.push_back({std::string("plasma_T_flat_55nm_") + (sap ? "sapphire" : "vacuum"), 1.02, 0.0,
                 Check::upper_bound, sap ? kPureSapphire : kPureVacuum, [sap] {
                   double lo = std::numeric_limits<double>::infinity();
                   double hi = 0.0;
                   for (double T : {1.0, 3.0, 10.0, 30.0, 77.0, 150.0, 300.0}) {
                     const double v = std::fabs(F(false, sap, 55 * nm, T, 1e-6));
                     lo = std::min(lo, v);
                     hi = std::max(hi, v);
                   }
                   return hi / lo;
                 }});
  }

  for (bool drude : {true, false}) {
    for (double a_nm : {20.0, 55.0, 100.0}) {
      s.push_back({"fd_pressure_" + std::string(drude ? "drude_" : "plasma_") +
                       std::to_string(static_cast<int>(a_nm)) + "nm",
                   1.0, 1e-4, Check::relative, kPureVacuum, [drude, a_nm] {
                     const double a = a_nm * nm;
                     const double h = a * 1e-4;
                     const double fd = -(F(drude, false, a + h, kRoom, 1e-10) - F(drude, false, a - h, kRoom, 1e-10)) /
                                       (2.0 * h);
                     return P(drude, false, a, kRoom, 1e-10) / fd;
                   }});
    }
  }
  return s;
}

}  // namespace

std::string to_string(Check c) {
  switch (c) {
    case Check::relative: return "relative";
    case Check::absolute: return "absolute";
    case Check::factor: return "factor";
    case Check::upper_bound: return "upper_bound";
    case Check::lower_bound: return "lower_bound";
    case Check::sig_figs: return "sig_figs";
  }
  return "?";
}

bool evaluate_check(Check check, double m, double e, double tol) {
  if (!std::isfinite(m)) return false;
  switch (check) {
    case Check::relative: return std::fabs(m / e - 1.0) <= tol;
    case Check::absolute: return std::fabs(m - e) <= tol;
    case Check::factor: return m / e > 0.0 && std::max(m / e, e / m) <= tol;
    case Check::upper_bound: return m <= e;
    case Check::lower_bound: return m >= e;
    case Check::sig_figs: {
      const int digits = static_cast<int>(tol);
      return round_sig(m, digits) == round_sig(e, digits);
    }
  }
  return false;
}

std::vector<FixtureOutcome> run_fixtures(int threads) {
  const auto list = specs();
  std::vector<FixtureOutcome> out(list.size());
  parallel_for(list.size(), threads, [&](std::size_t i) {
    const Spec& s = list[i];
    FixtureOutcome& o = out[i];
    o.name = s.name;
    o.expected = s.expected;
    o.tolerance = s.tolerance;
    o.check = s.check;
    o.model = s.model;
    try {
      if (s.reference) o.expected = s.reference();
      o.measured = s.measure();
      o.pass = evaluate_check(s.check, o.measured, o.expected, s.tolerance);
    } catch (const std::exception& e) {
      o.measured = std::numeric_limits<double>::quiet_NaN();
      o.error = e.what();
      o.pass = false;
    }
  });
  return out;
}

}  // namespace casimir::run
