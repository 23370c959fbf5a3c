#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "casimir/comparisons.hpp"
#include "casimir/dielectric.hpp"
#include "casimir/electrostatics_bvp.hpp"
#include "casimir/friction.hpp"
#include "casimir/geometry.hpp"
#include "casimir/oscillator_stats.hpp"
#include "casimir/quadrature.hpp"
#include "casimir/units.hpp"
#include "casimir/validation/oracles.hpp"

// The acceptance suite: nine criteria, each a list of measured-vs-expected
// checks with the tolerance pinned here. Shared by `casimir validate` and
// the acceptance test binary.
namespace casimir::acceptance {

enum class Tolerance { relative, absolute, upper_bound, window, exact };

struct Check {
  std::string name;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;  // or lower bound for a window
  double upper = 0.0;      // upper bound for a window
  Tolerance kind = Tolerance::relative;
  double quadrature_error = -1.0;  // relative; < 0 when not a numeric result
  bool pass = false;
};

struct CriterionReport {
  int id = 0;
  std::string title;
  std::vector<Check> checks;
  std::string failure;  // exception text, if the criterion could not run

  bool pass() const {
    return failure.empty() && !checks.empty() &&
           std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
  }
};

struct Settings {
  units::Constants constants = units::codata;
  quad::QuadratureSpec quadrature{};
};

namespace detail {

inline Check relative(std::string name, double measured, double expected, double tol, double qerr = -1.0) {
  Check c{std::move(name), measured, expected, tol, 0.0, Tolerance::relative, qerr, false};
  c.pass = std::isfinite(measured) && std::abs(measured - expected) <= tol * std::abs(expected);
  return c;
}
inline Check absolute(std::string name, double measured, double expected, double tol, double qerr = -1.0) {
  Check c{std::move(name), measured, expected, tol, 0.0, Tolerance::absolute, qerr, false};
  c.pass = std::isfinite(measured) && std::abs(measured - expected) <= tol;
  return c;
}
inline Check upper_bound(std::string name, double measured, double bound) {
  Check c{std::move(name), measured, 0.0, bound, 0.0, Tolerance::upper_bound, -1.0, false};
  c.pass = std::isfinite(measured) && measured < bound;
  return c;
}
inline Check window(std::string name, double measured, double lo, double hi, double qerr = -1.0) {
  Check c{std::move(name), measured, 0.5 * (lo + hi), lo, hi, Tolerance::window, qerr, false};
  c.pass = std::isfinite(measured) && measured >= lo && measured <= hi;
  return c;
}
inline Check exact(std::string name, double measured, double expected) {
  Check c{std::move(name), measured, expected, 0.0, 0.0, Tolerance::exact, -1.0, false};
  c.pass = measured == expected;
  return c;
}
inline Check flag(std::string name, bool ok) {
  Check c{std::move(name), ok ? 1.0 : 0.0, 1.0, 0.0, 0.0, Tolerance::exact, -1.0, false};
  c.pass = ok;
  return c;
}

inline dielectric::Drude gold() { return {9.0, 0.035}; }

inline friction::PlateSystem gold_system(double d_nm = 10.0, double v = 100.0, double T = 300.0) {
  const dielectric::MediumSpec m{gold(), {}, {}};
  return {m, m, d_nm, v, T};
}

inline friction::FrictionOptions options(const Settings& s,
                                         friction::Denominators d = friction::Denominators::drop) {
  friction::FrictionOptions o;
  o.quadrature = s.quadrature;
  o.denominators = d;
  o.constants = s.constants;
  return o;
}

/// Least-squares slope of log y against log x.
inline double log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace detail

inline CriterionReport criterion1(const Settings& s) {
  using namespace detail;
  CriterionReport r{1, "gold plate-plate friction", {}, {}};
  const auto sys = gold_system();
  const auto closed = friction::friction_drude_closed_form(sys, options(s));
  r.checks.push_back(relative("closed-form force [Pa] vs 3.29e-11", closed.force, 3.29e-11, 5e-3));
  const auto drop = friction::friction_dense(sys, options(s, friction::Denominators::drop));
  r.checks.push_back(relative("dense drop / closed form", drop.force / closed.force, 1.0, 1e-2, drop.quadrature_error));
  const auto keep = friction::friction_dense(sys, options(s, friction::Denominators::keep));
  r.checks.push_back(window("dense keep / dense drop", keep.force / drop.force, 1.0, 1.25, keep.quadrature_error));
  return r;
}

inline CriterionReport criterion2(const Settings& s) {
  using namespace detail;
  CriterionReport r{2, "thermal integral", {}, {}};
  const auto i = quad::integrate_semi_infinite(
      [](double x) {
        const double d = -std::expm1(-x);
        return x * x * std::exp(-x) / (d * d);
      },
      1.0, s.quadrature);
  r.checks.push_back(absolute("int x^2 e^-x/(1-e^-x)^2 vs pi^2/3", i.value,
                              std::numbers::pi * std::numbers::pi / 3.0, 1e-8, i.relative_error()));
  return r;
}

inline CriterionReport criterion3(const Settings& s) {
  using namespace detail;
  CriterionReport r{3, "geometric identities", {}, {}};
  const double gp = geometry::G_perp(1.0);
  r.checks.push_back(relative("G_perp(1 nm) analytic vs 15 pi/2", gp, 15.0 * std::numbers::pi / 2.0, 1e-15));
  const auto k = geometry::G_perp_fourier(1.0, s.quadrature);
  r.checks.push_back(relative("G_perp(1 nm) k-space quadrature vs analytic", k.value, gp, 1e-6, k.relative_error()));
  const auto rs = geometry::G_perp_real_space(1.0, s.quadrature);
  r.checks.push_back(relative("G_perp(1 nm) real-space quadrature vs analytic", rs.value, gp, 1e-6, rs.relative_error()));
  const auto u = quad::integrate_semi_infinite([](double x) { return x * x * x * std::exp(-2.0 * x); }, 1.0,
                                               quad::QuadratureSpec{1e-13, 1e-12, 10000});
  r.checks.push_back(absolute("int u^3 e^-2u du vs 3/8", u.value, 0.375, 1e-10, u.relative_error()));
  for (double z0 : {1.0, 2.0}) {
    const auto gh = geometry::G_halfplane_quadrature(1.0, z0, s.quadrature);
    r.checks.push_back(relative("G_h(rho=1, z0=" + std::to_string(static_cast<int>(z0)) + ") z-quadrature vs analytic",
                                gh.value, geometry::G_halfplane(1.0, z0), 1e-6, gh.relative_error()));
  }
  const auto g = geometry::G_two_planes_quadrature(1.0, 1.0, 1.0, s.quadrature);
  r.checks.push_back(relative("G(rho=1, d=1) z0-quadrature vs analytic", g.value, geometry::G_two_planes(1.0, 1.0, 1.0),
                              1e-6, g.relative_error()));
  const auto gu = geometry::G_two_planes_u_space(1.0, 1.0, 1.0, s.quadrature);
  r.checks.push_back(relative("G(rho=1, d=1) u-space vs analytic", gu.value, geometry::G_two_planes(1.0, 1.0, 1.0),
                              1e-6, gu.relative_error()));
  return r;
}

inline CriterionReport criterion4(const Settings& s) {
  using namespace detail;
  CriterionReport r{4, "Pendry comparison", {}, {}};
  r.checks.push_back(relative("ratio_to_pendry(300 K, 100 m/s, 10 nm) vs 1.95e9",
                              comparisons::ratio_to_pendry(300.0, 100.0, 10e-9, s.constants), 1.95e9, 5e-3));
  const double rate = 1.12e10;
  const double fp = comparisons::pendry_force({rate, 1e-10, 1.0}, s.constants);
  r.checks.push_back(relative("pendry_force(pendry97, 0.1 nm, 1 m/s) [Pa] vs 1.6e3", fp, 1.6e3, 1e-2));
  const dielectric::MediumSpec m{comparisons::drude_from_conductivity(rate, 0.035, s.constants), {}, {}};
  const friction::PlateSystem sys{m, m, 0.1, 1.0, 300.0};
  const auto f = friction::friction_drude_closed_form(sys, options(s));
  r.checks.push_back(relative("closed form on pendry97 (0.1 nm, 1 m/s, 300 K) [Pa] vs 3.5e12", f.force, 3.5e12, 2e-2));
  return r;
}

inline CriterionReport criterion5(const Settings& s) {
  using namespace detail;
  CriterionReport r{5, "Volokitin-Persson comparison", {}, {}};
  const auto sys = gold_system();
  const auto ours = friction::friction_drude_closed_form(sys, options(s));
  const double rate = comparisons::conductivity_rate(gold(), s.constants);
  const auto vp = comparisons::vp_friction({rate, 10e-9, 300.0, 100.0}, s.constants);
  r.checks.push_back(relative("VP force / our force (gold)", vp.force / ours.force, 1.2, 0.1));
  return r;
}

inline CriterionReport criterion6(const Settings&) {
  using namespace detail;
  CriterionReport r{6, "spectral machinery", {}, {}};
  const dielectric::PermittivityModel model = gold();
  const auto S = dielectric::continuous_spectrum(model);
  const double ep = dielectric::surface_energy(9.0);
  const double sigma = 0.035;
  // integral S/m^2 d(m^2) = integral 2 S / m dm
  const double breaks[] = {ep};
  const auto sum = quad::integrate_semi_infinite([&](double m) { return m > 0.0 ? 2.0 * S(m) / m : 0.0; }, ep,
                                                 quad::QuadratureSpec{1e-14, 1e-11, 20000}, breaks);
  r.checks.push_back(relative("Drude sum rule", sum.value, 1.0, 1e-6, sum.relative_error()));

  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double m = ep * (0.05 + 1.95 * i / 19.0);
    const double generic = dielectric::spectral_from_retarded(model, m);
    worst = std::max(worst, std::abs(generic / S(m) - 1.0));
  }
  worst = std::max(worst, std::abs(dielectric::spectral_from_retarded(model, ep) / S(ep) - 1.0));
  r.checks.push_back(upper_bound("retarded-branch extraction vs closed form, max rel. dev. (21 m)", worst, 1e-6));

  // Slope at m -> 0 from the retarded branch, extrapolated in m^2.
  std::vector<double> h, y;
  for (double f : {4e-3, 2e-3, 1e-3, 5e-4}) {
    const double m = f * sigma;
    h.push_back(m * m);
    y.push_back(dielectric::spectral_from_retarded(model, m, m) / m);
  }
  const double slope = quad::extrapolate_to_zero(h, y, h.size());
  r.checks.push_back(relative("small-m slope vs sigma/(pi e_p^2)", slope, sigma / (std::numbers::pi * ep * ep), 1e-6));
  return r;
}

inline CriterionReport criterion7(const Settings&) {
  using namespace detail;
  CriterionReport r{7, "boundary-value solver", {}, {}};
  std::mt19937_64 rng(20240607);
  std::uniform_real_distribution<double> eps(1.0, 100.0), logqd(std::log(0.01), std::log(10.0));
  double worst_res = 0.0, worst_den = 0.0, worst_lin = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double d = 1.0 + 9.0 * static_cast<double>(i % 10) / 9.0;
    const bvp::LayeredConfig c{eps(rng), eps(rng), d, std::exp(logqd(rng)) / d, -0.5 * d};
    const auto sol = bvp::solve_layers(c);
    for (double res : bvp::boundary_residuals(c, sol)) worst_res = std::max(worst_res, res);
    const auto den = bvp::denominator_check(c);
    worst_den = std::max(worst_den, std::abs(den.from_D - den.from_formula) / den.from_formula);
    const auto lin = bvp::solve_layers_linear(c);
    worst_lin = std::max(worst_lin, std::abs(lin.D - sol.D) / sol.D);
  }
  r.checks.push_back(upper_bound("max boundary residual, 1000 random configs", worst_res, 1e-12));
  r.checks.push_back(upper_bound("max rel. dev. of D's denominator from 1 - A1 A2 e^-2qd", worst_den, 1e-12));
  r.checks.push_back(upper_bound("max rel. dev. of D, closed form vs 4x4 solve", worst_lin, 1e-12));
  const auto vac = bvp::solve_layers({1.0, 1.0, 1.0, 0.7, -0.3});
  r.checks.push_back(exact("vacuum D", vac.D, 1.0));
  r.checks.push_back(exact("vacuum B", vac.B, 0.0));
  const dielectric::Plasma plasma{9.0};
  const double ws = dielectric::surface_plasmon_frequency(plasma);
  const double eps_s = dielectric::eps_plasma_real(plasma, ws);
  r.checks.push_back(absolute("plasma eps at omega_p/sqrt2", eps_s, -1.0, 1e-12));
  bool detected = false;
  try {
    bvp::solve_layers({-1.0, 3.0, 1.0, 1.0, -0.5});
  } catch (const SingularityError&) {
    detected = true;
  }
  r.checks.push_back(flag("solver reports the eps = -1 pole", detected));
  return r;
}

inline CriterionReport criterion8(const Settings& s) {
  using namespace detail;
  CriterionReport r{8, "oscillator statistics", {}, {}};
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> la(-1.0, 1.0), unit(0.0, 1.0);
  double worst = 0.0;
  const quad::QuadratureSpec series_spec{1e-13, 1e-11, 10000};
  for (int i = 0; i < 100; ++i) {
    const oscillators::OscillatorSpec osc{std::pow(10.0, la(rng)), std::pow(10.0, la(rng))};
    const double beta = std::pow(10.0, la(rng));
    const double lambda = beta * (std::floor(unit(rng) * 13.0) / 12.0);
    const double exact_v = oscillators::g_imaginary_time(osc, lambda, beta);
    const auto series = oscillators::g_imaginary_time_series(osc, lambda, beta, series_spec);
    worst = std::max(worst, std::abs(series.value / exact_v - 1.0));
  }
  r.checks.push_back(upper_bound("transform pair g(lambda) vs Matsubara series, max rel. dev. (100 draws)", worst, 1e-8));

  const double a1 = 1.0, a2 = 1.0, phi = 0.5, beta = 1.0;
  const auto mc = oracles::sample_pair(a1, a2, phi, beta, 1000000, 46);
  const auto c = oscillators::pair_correlators(a1, a2, phi, beta);
  const auto f4 = oscillators::pair_fourth_moment(a1, a2, phi, beta);
  auto within3 = [&](std::string name, const oracles::Estimate& e, double expected) {
    Check ch = relative(std::move(name), e.mean, expected, 0.0);
    ch.kind = Tolerance::absolute;
    ch.tolerance = 3.0 * e.std_error;
    ch.pass = std::abs(e.mean - expected) <= ch.tolerance;
    r.checks.push_back(ch);
  };
  within3("MC beta<s1^2> (3 sigma)", mc.s1s1, c.s1s1);
  within3("MC beta<s2^2> (3 sigma)", mc.s2s2, c.s2s2);
  // The pair energy carries +phi s1 s2, so the sampled moment is -I'.
  within3("MC -beta<s1 s2> (3 sigma)", {-mc.s1s2.mean, mc.s1s2.std_error}, c.s1s2);
  within3("MC fourth moment (3 sigma)", mc.fourth, f4.total());

  const oscillators::BroadenedOscillator bo{1.0, gold()};
  const double b = units::beta(300.0, s.constants) / 50.0;  // hot enough that the peak matters
  double worst_fdt = 0.0;
  const double ep = dielectric::surface_energy(9.0);
  for (int i = 0; i < 20; ++i) {
    const double m = ep * (0.1 + 1.9 * i / 19.0);
    const double lhs = oscillators::dissipation_correlation(bo, m, b);
    const double rhs = oscillators::spectral_correlation(bo, m, b);
    worst_fdt = std::max(worst_fdt, std::abs(lhs / rhs - 1.0));
  }
  r.checks.push_back(upper_bound("fluctuation-dissipation, max rel. dev. on 20 m points", worst_fdt, 1e-6));
  const quad::QuadratureSpec tight{1e-14, 1e-10, 20000};
  const auto g_spec = oscillators::equal_time_from_spectrum(bo, b, tight);
  const auto g_mats = oscillators::equal_time_from_matsubara(bo, b, tight);
  r.checks.push_back(relative("equal-time g(0): spectral integral vs Matsubara sum", g_spec.value, g_mats.value, 1e-6,
                              g_spec.relative_error()));
  return r;
}

inline CriterionReport criterion9(const Settings& s) {
  using namespace detail;
  CriterionReport r{9, "scaling properties", {}, {}};
  const auto opts = options(s);
  const auto f100 = friction::friction_dense(gold_system(10, 100, 300), opts).force;
  const auto f200 = friction::friction_dense(gold_system(10, 200, 300), opts).force;
  const auto f50 = friction::friction_dense(gold_system(10, 50, 300), opts).force;
  r.checks.push_back(exact("F(2v) / (2 F(v))", f200 / (2.0 * f100), 1.0));
  r.checks.push_back(exact("F(v/2) / (F(v)/2)", f50 / (0.5 * f100), 1.0));

  std::vector<double> ds{5, 10, 20, 35, 50}, fd;
  double worst_d = 0.0;
  for (double d : ds) fd.push_back(friction::friction_dense(gold_system(d), opts).force);
  for (std::size_t i = 0; i < ds.size(); ++i)
    worst_d = std::max(worst_d, std::abs(fd[i] * std::pow(ds[i] / 10.0, 4) / fd[1] - 1.0));
  r.checks.push_back(relative("log-log slope of F vs d on [5, 50] nm", log_slope(ds, fd), -4.0, 1e-2));
  r.checks.push_back(upper_bound("max deviation of F d^4 from its 10 nm value", worst_d, 1e-2));

  std::vector<double> Ts{100, 200, 300, 450, 600}, fT;
  double worst_T = 0.0;
  for (double T : Ts) fT.push_back(friction::friction_dense(gold_system(10, 100, T), opts).force);
  for (std::size_t i = 0; i < Ts.size(); ++i)
    worst_T = std::max(worst_T, std::abs(fT[i] * std::pow(300.0 / Ts[i], 2) / fT[2] - 1.0));
  r.checks.push_back(relative("log-log slope of F vs T on [100, 600] K", log_slope(Ts, fT), 2.0, 1e-2));
  r.checks.push_back(upper_bound("max deviation of F / T^2 from its 300 K value", worst_T, 1e-2));
  return r;
}

inline const std::vector<std::function<CriterionReport(const Settings&)>>& criteria() {
  static const std::vector<std::function<CriterionReport(const Settings&)>> all{
      criterion1, criterion2, criterion3, criterion4, criterion5,
      criterion6, criterion7, criterion8, criterion9};
  return all;
}

inline CriterionReport run(int id, const Settings& s) {
  if (id < 1 || id > static_cast<int>(criteria().size()))
    throw DomainError("no acceptance criterion " + std::to_string(id));
  try {
    return criteria()[static_cast<std::size_t>(id - 1)](s);
  } catch (const std::exception& e) {
    CriterionReport r{id, "criterion " + std::to_string(id), {}, e.what()};
    return r;
  }
}

inline std::string describe(const Check& c) {
  std::ostringstream o;
  o << std::setprecision(6) << (c.pass ? "ok   " : "FAIL ") << c.name << ": measured " << c.measured;
  switch (c.kind) {
    case Tolerance::relative: o << ", expected " << c.expected << " (rel. tol " << c.tolerance << ")"; break;
    case Tolerance::absolute: o << ", expected " << c.expected << " (abs. tol " << c.tolerance << ")"; break;
    case Tolerance::upper_bound: o << " (must be < " << c.tolerance << ")"; break;
    case Tolerance::window: o << " (window [" << c.tolerance << ", " << c.upper << "])"; break;
    case Tolerance::exact: o << ", expected exactly " << c.expected; break;
  }
  if (c.quadrature_error >= 0.0) o << ", quadrature error " << c.quadrature_error;
  return o.str();
}

/// One PASS/FAIL line per criterion followed by its indented checks.
inline void print(std::ostream& out, const CriterionReport& r) {
  std::size_t passed = 0;
  for (const auto& c : r.checks) passed += c.pass ? 1 : 0;
  out << (r.pass() ? "PASS" : "FAIL") << "  criterion " << r.id << ": " << r.title << " (" << passed << "/"
      << r.checks.size() << " checks)\n";
  if (!r.failure.empty()) out << "      error: " << r.failure << "\n";
  for (const auto& c : r.checks) out << "      " << describe(c) << "\n";
}

}  // namespace casimir::acceptance
