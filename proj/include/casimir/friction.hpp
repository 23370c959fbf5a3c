#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "casimir/dielectric.hpp"
#include "casimir/errors.hpp"
#include "casimir/geometry.hpp"
#include "casimir/oscillator_stats.hpp"
#include "casimir/quadrature.hpp"
#include "casimir/units.hpp"

// Friction between polarizable media moving parallel to each other.
//
// Every route has the form F = G v H0: G collects the geometry, H0 the
// thermal overlap of the two dissipative spectra,
//   H0 = (pi beta hbar / 2) integral S1(m) S2(m) / sinh^2(beta m / 2) dm,
// with S the per-particle spectral functions alpha_I(m^2) m^2 (nm^3).
// For dense media the spectra are replaced by those of the reflection
// amplitudes, S_A = 2 pi rho S, so the densities cancel between G and H0.
namespace casimir::friction {

enum class Route { dilute, dense_full, drude_closed_form, hybrid };

/// How the coupling denominator 1 - A1 A2 exp(-2u) enters the dense route.
///   drop    : numerators only (the perturbative treatment; default)
///   keep    : the denominator kept as |1 - A1 A2 exp(-2u)|^-2 on the direct channel
///   literal : -Im of the full correlators h11, h22, h12 and both channels
enum class Denominators { drop, keep, literal };

inline std::string to_string(Route r) {
  switch (r) {
    case Route::dilute: return "dilute";
    case Route::dense_full: return "dense-full";
    case Route::drude_closed_form: return "drude-closed-form";
    case Route::hybrid: return "hybrid";
  }
  return "?";
}

inline std::string to_string(Denominators d) {
  switch (d) {
    case Denominators::drop: return "drop";
    case Denominators::keep: return "keep";
    case Denominators::literal: return "literal";
  }
  return "?";
}

inline std::optional<Route> parse_route(std::string_view s) {
  if (s == "dilute") return Route::dilute;
  if (s == "dense-full") return Route::dense_full;
  if (s == "drude-closed-form") return Route::drude_closed_form;
  if (s == "hybrid") return Route::hybrid;
  return std::nullopt;
}

inline std::optional<Denominators> parse_denominators(std::string_view s) {
  if (s == "drop") return Denominators::drop;
  if (s == "keep") return Denominators::keep;
  if (s == "literal") return Denominators::literal;
  return std::nullopt;
}

struct PlateSystem {
  dielectric::MediumSpec medium1;
  dielectric::MediumSpec medium2;
  double d_nm;
  double v_m_per_s;
  double T_K;

  void validate() const {
    if (!(d_nm > 0.0) || !std::isfinite(d_nm)) throw DomainError("separation d must be positive");
    if (!(v_m_per_s >= 0.0) || !std::isfinite(v_m_per_s))
      throw DomainError("velocity must be non-negative");
    if (!(T_K > 0.0) || !std::isfinite(T_K)) throw DomainError("temperature must be positive");
    for (const auto* m : {&medium1, &medium2}) {
      dielectric::validate(m->model);
      if (m->density_per_nm3 && !(*m->density_per_nm3 > 0.0))
        throw DomainError("density must be positive when given");
      if (m->polarizability_nm3 && !(*m->polarizability_nm3 > 0.0))
        throw DomainError("polarizability must be positive when given");
    }
  }
};

/// A single polarizable particle at height z0 above a half-plane.
struct HybridSystem {
  dielectric::MediumSpec probe;  // needs polarizability_nm3
  dielectric::PermittivityModel plate;
  double z0_nm;
  double v_m_per_s;
  double T_K;
};

struct FrictionOptions {
  quad::QuadratureSpec quadrature{};
  Denominators denominators = Denominators::drop;
  units::Constants constants = units::codata;
};

struct FrictionResult {
  double force = 0.0;  // magnitude
  std::string force_unit = "Pa";
  std::string direction = "opposes v";
  double H0 = 0.0;
  std::string H0_unit;
  double G = 0.0;
  std::string G_unit;
  double quadrature_error = 0.0;  // relative
  Route route = Route::dense_full;
  Denominators denominators = Denominators::drop;
  bool converged = true;
  std::vector<std::string> notes;
};

namespace detail {

/// 1 / sinh^2(x/2), stable for large x.
inline double thermal_weight(double x) {
  const double d = -std::expm1(-x);
  return 4.0 * std::exp(-x) / (d * d);
}

/// integral_0^inf product(m) / sinh^2(beta m / 2) dm.
///
/// Integrated over [0, m_max], m_max = max(40/beta, 10 * largest peak); the
/// neglected tail is bounded by sup(product) on [m_max, 4 m_max] times the
/// exact tail of the thermal weight and added to the error estimate. The
/// absolute tolerance is taken relative to a coarse Riemann estimate of the
/// integral, so tiny physical magnitudes still get relative accuracy.
template <class P>
quad::IntegralResult thermal_integral(P&& product, double beta, const std::vector<double>& peaks,
                                      const quad::QuadratureSpec& spec,
                                      std::vector<std::string>* notes = nullptr) {
  double peak_max = 0.0;
  for (double p : peaks) peak_max = std::max(peak_max, p);
  const double m_max = std::max(40.0 / beta, 10.0 * peak_max);

  auto f = [&](double m) {
    if (m <= 0.0) return 0.0;
    const double p = product(m);
    if (p == 0.0) return 0.0;
    return p * thermal_weight(beta * m);
  };

  std::vector<double> breaks;
  for (double k : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) breaks.push_back(k / beta);
  for (double p : peaks)
    if (p > 0.0) breaks.push_back(p);

  constexpr int n_probe = 512;
  double crude = 0.0;
  for (int i = 0; i < n_probe; ++i) {
    const double m = m_max * (i + 0.5) / n_probe;
    crude += std::abs(f(m)) * m_max / n_probe;
  }
  quad::QuadratureSpec local = spec;
  if (crude > 0.0 && std::isfinite(crude)) local.abs_tol = spec.abs_tol * crude;

  auto r = quad::integrate_finite(f, 0.0, m_max, local, breaks);

  double sup = 0.0;
  for (int i = 0; i <= 64; ++i) sup = std::max(sup, std::abs(product(m_max * (1.0 + 3.0 * i / 64.0))));
  const double x = beta * m_max;
  const double tail = sup * (4.0 / beta) * std::exp(-x) / -std::expm1(-x);
  r.error_estimate += tail;
  if (tail > std::max(local.abs_tol, spec.rel_tol * std::abs(r.value))) {
    r.converged = false;
    if (notes) notes->push_back("spectral tail beyond m_max exceeds tolerance");
  }
  return r;
}

inline double peak_of(const dielectric::SpectralDensity& s) { return s.peak_hint; }

inline double amplitude_at_zero(const dielectric::PermittivityModel& model) {
  const double a0 = dielectric::reflection_amplitude(model, 0.0);
  if (!(a0 > 0.0))
    throw DomainError(dielectric::model_name(model) + " model has no static response (A(0) = 0)");
  return a0;
}

}  // namespace detail

/// Per-particle spectral function alpha_I(m^2) m^2 in nm^3.
///
/// With an explicit polarizability the model only supplies the line shape:
/// S = alpha * S_A / A(0). Otherwise the dense bridge alpha -> A / (2 pi rho)
/// is used, which needs the density.
inline dielectric::SpectralDensity particle_spectrum(const dielectric::MediumSpec& medium) {
  if (std::holds_alternative<dielectric::Vacuum>(medium.model))
    return {[](double) { return 0.0; }, 0.0};
  auto shape = dielectric::continuous_spectrum(medium.model);
  double factor = 0.0;
  if (medium.polarizability_nm3) {
    factor = *medium.polarizability_nm3 / detail::amplitude_at_zero(medium.model);
  } else if (medium.density_per_nm3) {
    factor = 1.0 / (2.0 * std::numbers::pi * *medium.density_per_nm3);
  } else {
    throw ConfigError("medium", "dilute routes need a polarizability or a density");
  }
  return {[shape, factor](double m) { return factor * shape(m); }, shape.peak_hint};
}

/// H0 = (pi beta hbar / 2) integral S1 S2 / sinh^2(beta m/2) dm, in J s nm^6.
inline quad::IntegralResult H0_dilute(const dielectric::SpectralDensity& s1,
                                      const dielectric::SpectralDensity& s2, double T_K,
                                      const FrictionOptions& opts = {},
                                      std::vector<std::string>* notes = nullptr) {
  const double beta = units::beta(T_K, opts.constants);
  auto r = detail::thermal_integral([&](double m) { return s1(m) * s2(m); }, beta,
                                    {s1.peak_hint, s2.peak_hint}, opts.quadrature, notes);
  const double pre = std::numbers::pi * beta * opts.constants.hbar_J_s / 2.0;
  r.value *= pre;
  r.error_estimate *= pre;
  return r;
}

/// F = G v H0 for two dilute half-planes, G = 3 pi rho1 rho2 / (8 d^4).
inline FrictionResult friction_dilute(const PlateSystem& sys, const FrictionOptions& opts = {}) {
  sys.validate();
  if (!sys.medium1.density_per_nm3 || !sys.medium2.density_per_nm3)
    throw ConfigError("system", "the dilute route needs density_per_nm3 for both media");
  FrictionResult out;
  out.route = Route::dilute;
  out.denominators = opts.denominators;
  const auto s1 = particle_spectrum(sys.medium1);
  const auto s2 = particle_spectrum(sys.medium2);
  const auto h0 = H0_dilute(s1, s2, sys.T_K, opts, &out.notes);
  out.G = geometry::G_two_planes(*sys.medium1.density_per_nm3, *sys.medium2.density_per_nm3,
                                 sys.d_nm);
  out.G_unit = "nm^-10";
  out.H0 = h0.value;
  out.H0_unit = "J s nm^6";
  // nm^-10 * J s nm^6 * m/s = J m / nm^4 = 1e36 Pa
  out.force = 1e36 * out.G * sys.v_m_per_s * out.H0;
  out.quadrature_error = h0.relative_error();
  out.converged = h0.converged;
  return out;
}

/// Spectral products of the two channels of the dense integrand at (m, u),
/// in reflection-amplitude normalization.
struct DenseChannels {
  double direct;    // S11 * S22
  double exchange;  // S12 * S12
};

class DenseIntegrand {
 public:
  DenseIntegrand(const dielectric::PermittivityModel& m1, const dielectric::PermittivityModel& m2,
                 Denominators mode)
      : model1_(m1), model2_(m2), mode_(mode) {
    for (const auto* m : {&m1, &m2}) {
      if (std::holds_alternative<dielectric::Vacuum>(*m)) continue;
      (void)dielectric::continuous_spectrum(*m);  // rejects delta lines
      if (mode != Denominators::drop && std::holds_alternative<dielectric::Tabulated>(*m))
        throw UnsupportedModel("denominators = " + to_string(mode) +
                               " needs the complex amplitude; tabulated models only carry "
                               "a spectral density");
    }
    s1_ = spectrum_or_zero(m1);
    s2_ = spectrum_or_zero(m2);
  }

  DenseChannels operator()(double m, double u) const {
    switch (mode_) {
      case Denominators::drop:
        return {s1_(m) * s2_(m), 0.0};
      case Denominators::keep: {
        const auto a1 = amplitude(model1_, m);
        const auto a2 = amplitude(model2_, m);
        const double denom = std::norm(1.0 - a1 * a2 * std::exp(-2.0 * u));
        return {s1_(m) * s2_(m) / denom, 0.0};
      }
      case Denominators::literal: {
        const auto h = oscillators::plane_correlators(amplitude(model1_, m), amplitude(model2_, m), u);
        const double s11 = -h.h11.imag() / std::numbers::pi;
        const double s22 = -h.h22.imag() / std::numbers::pi;
        const double s12 = -h.h12.imag() / std::numbers::pi;
        return {s11 * s22, s12 * s12};
      }
    }
    return {0.0, 0.0};
  }

  std::vector<double> peaks() const { return {s1_.peak_hint, s2_.peak_hint}; }

 private:
  static dielectric::SpectralDensity spectrum_or_zero(const dielectric::PermittivityModel& m) {
    if (std::holds_alternative<dielectric::Vacuum>(m)) return {[](double) { return 0.0; }, 0.0};
    return dielectric::continuous_spectrum(m);
  }
  static std::complex<double> amplitude(const dielectric::PermittivityModel& m, double energy) {
    if (std::holds_alternative<dielectric::Vacuum>(m)) return 0.0;
    return dielectric::amplitude_retarded(m, energy);
  }

  dielectric::PermittivityModel model1_, model2_;
  Denominators mode_;
  dielectric::SpectralDensity s1_, s2_;
};

/// (2 pi)^2 rho1 rho2 H0(u) = (pi beta hbar / 2) integral [S11 S22 + S12^2] / sinh^2 dm,
/// in J s. Densities never enter.
inline quad::IntegralResult H0_dense_at_u(const dielectric::PermittivityModel& model1,
                                          const dielectric::PermittivityModel& model2, double T_K,
                                          double u, const FrictionOptions& opts = {},
                                          std::vector<std::string>* notes = nullptr) {
  if (!(u > 0.0)) throw DomainError("u must be positive");
  const double beta = units::beta(T_K, opts.constants);
  const DenseIntegrand integrand(model1, model2, opts.denominators);
  auto r = detail::thermal_integral(
      [&](double m) {
        const auto c = integrand(m, u);
        return c.direct + c.exchange;
      },
      beta, integrand.peaks(), opts.quadrature, notes);
  const double pre = std::numbers::pi * beta * opts.constants.hbar_J_s / 2.0;
  r.value *= pre;
  r.error_estimate *= pre;
  return r;
}

namespace detail {
// Reports G and H0 with the densities when both are known, otherwise in
// the density-free normalization; the product G*H0 is the same.
inline void fill_dense_factors(FrictionResult& out, const PlateSystem& sys, double H0_A) {
  const double geometric = 3.0 * std::numbers::pi / (8.0 * std::pow(sys.d_nm, 4));
  const double four_pi2 = 4.0 * std::numbers::pi * std::numbers::pi;
  if (sys.medium1.density_per_nm3 && sys.medium2.density_per_nm3) {
    const double rr = *sys.medium1.density_per_nm3 * *sys.medium2.density_per_nm3;
    out.G = geometric * rr;
    out.G_unit = "nm^-10";
    out.H0 = H0_A / (four_pi2 * rr);
    out.H0_unit = "J s nm^6";
  } else {
    out.G = geometric;
    out.G_unit = "nm^-4 (per rho1 rho2)";
    out.H0 = H0_A / four_pi2;
    out.H0_unit = "J s (times rho1 rho2)";
  }
}
}  // namespace detail

/// Dense plate-plate friction,
///   F = G v H0,  H0 = (8/3) integral_0^inf u^3 H0(u) exp(-2u) du,
/// evaluated as a nested quadrature (outer u, inner m).
inline FrictionResult friction_dense(const PlateSystem& sys, const FrictionOptions& opts = {}) {
  sys.validate();
  FrictionResult out;
  out.route = Route::dense_full;
  out.denominators = opts.denominators;

  const double beta = units::beta(sys.T_K, opts.constants);
  const DenseIntegrand integrand(sys.medium1.model, sys.medium2.model, opts.denominators);
  const double hbar = opts.constants.hbar_J_s;
  const double pre = std::numbers::pi * beta * hbar / 2.0;

  double worst_inner = 0.0;
  bool inner_ok = true;
  auto outer = [&](double u) {
    if (u <= 0.0) return 0.0;
    auto r = detail::thermal_integral(
        [&](double m) {
          const auto c = integrand(m, u);
          return c.direct + c.exchange;
        },
        beta, integrand.peaks(), opts.quadrature);
    worst_inner = std::max(worst_inner, r.relative_error());
    inner_ok = inner_ok && r.converged;
    return u * u * u * std::exp(-2.0 * u) * r.value;
  };

  // Log-spaced cuts resolve the small-u structure of the coupled channels.
  std::vector<double> u_breaks;
  for (double u = 1e-4; u < 40.0; u *= 4.0) u_breaks.push_back(u);
  quad::QuadratureSpec outer_spec = opts.quadrature;
  {
    double crude = 0.0;
    for (double u : {0.5, 1.5, 2.5}) crude += std::abs(outer(u));
    if (crude > 0.0) outer_spec.abs_tol = opts.quadrature.abs_tol * crude;
  }
  const auto r = quad::integrate_finite(outer, 0.0, 40.0, outer_spec, u_breaks);

  const double H0_A = pre * (8.0 / 3.0) * r.value;
  detail::fill_dense_factors(out, sys, H0_A);
  // 3 pi / (8 d^4) [nm^-4] * v * H0_A / (4 pi^2) [J s] -> 1e36 Pa
  out.force = 1e36 * 3.0 / (32.0 * std::numbers::pi * std::pow(sys.d_nm, 4)) * sys.v_m_per_s * H0_A;
  out.quadrature_error = r.relative_error() + worst_inner;
  out.converged = r.converged && inner_ok;
  if (!inner_ok) out.notes.push_back("inner m-quadrature flagged non-convergence");
  if (opts.denominators == Denominators::literal)
    out.notes.push_back("literal denominators: -Im of the full correlators in both channels");
  return out;
}

/// F = hbar v (k_B T)^2 (hbar nu)^2 / (4 d^4 (hbar omega_p)^4), equal Drude media,
/// valid for hbar*nu << hbar*omega_p/sqrt(2).
inline FrictionResult friction_drude_closed_form(const PlateSystem& sys,
                                                 const FrictionOptions& opts = {}) {
  sys.validate();
  const auto* a = std::get_if<dielectric::Drude>(&sys.medium1.model);
  const auto* b = std::get_if<dielectric::Drude>(&sys.medium2.model);
  if (!a || !b)
    throw UnsupportedModel("the closed form needs two Drude media, got " +
                           dielectric::model_name(sys.medium1.model) + " and " +
                           dielectric::model_name(sys.medium2.model));
  if (a->plasma_energy != b->plasma_energy || a->damping != b->damping)
    throw UnsupportedModel("the closed form needs identical Drude media");

  FrictionResult out;
  out.route = Route::drude_closed_form;
  out.denominators = Denominators::drop;
  const double kT = units::thermal_energy(sys.T_K, opts.constants);
  const double hbar = opts.constants.hbar_J_s;
  const double ratio = kT * a->damping / (a->plasma_energy * a->plasma_energy);
  const double d_m = units::nm_to_m(sys.d_nm);
  out.force = hbar * sys.v_m_per_s * ratio * ratio / (4.0 * std::pow(d_m, 4));

  // H0 in reflection-amplitude normalization: (2 pi hbar / 3) (k_B T)^2 sigma^2 / e_p^4.
  const double ep2 = 0.5 * a->plasma_energy * a->plasma_energy;
  const double H0_A = 2.0 * std::numbers::pi * hbar / 3.0 * kT * kT * a->damping * a->damping /
                      (ep2 * ep2);
  detail::fill_dense_factors(out, sys, H0_A);
  out.quadrature_error = 0.0;
  if (a->damping == 0.0)
    out.notes.push_back("zero damping: the spectrum is a delta line, no overlap at low m, force 0");
  const double small = a->damping / dielectric::surface_energy(a->plasma_energy);
  if (small > 1e-2)
    out.notes.push_back("damping/e_p = " + std::to_string(small) +
                        " is not small; the linear small-m spectrum behind the closed form "
                        "may be inaccurate");
  if (kT > 0.1 * dielectric::surface_energy(a->plasma_energy))
    out.notes.push_back("k_B T is not small against e_p; the closed form may be inaccurate");
  return out;
}

/// Friction on one dilute particle above a dense half-plane:
/// F = G_h v H0 with the plate's polarizability replaced by A / (2 pi rho2),
/// so rho2 cancels: F = (3 pi / (2 z0^5)) v (beta hbar / 4) integral S_probe S_A / sinh^2 dm.
inline FrictionResult friction_hybrid(const HybridSystem& sys, const FrictionOptions& opts = {}) {
  if (!(sys.z0_nm > 0.0)) throw DomainError("z0 must be positive");
  if (!(sys.v_m_per_s >= 0.0)) throw DomainError("velocity must be non-negative");
  if (!sys.probe.polarizability_nm3)
    throw ConfigError("probe", "the hybrid route needs the probe polarizability_nm3");
  dielectric::validate(sys.plate);
  FrictionResult out;
  out.route = Route::hybrid;
  out.denominators = Denominators::drop;
  out.force_unit = "N";

  const auto probe = particle_spectrum(sys.probe);
  const dielectric::SpectralDensity plate =
      std::holds_alternative<dielectric::Vacuum>(sys.plate)
          ? dielectric::SpectralDensity{[](double) { return 0.0; }, 0.0}
          : dielectric::continuous_spectrum(sys.plate);
  const double beta = units::beta(sys.T_K, opts.constants);
  auto r = detail::thermal_integral([&](double m) { return probe(m) * plate(m); }, beta,
                                    {probe.peak_hint, plate.peak_hint}, opts.quadrature,
                                    &out.notes);
  const double H0_scaled = beta * opts.constants.hbar_J_s / 4.0 * r.value;  // rho2 * H0, J s nm^3
  out.G = 3.0 * std::numbers::pi / (2.0 * std::pow(sys.z0_nm, 5));
  out.G_unit = "nm^-5 (per rho2)";
  out.H0 = H0_scaled;
  out.H0_unit = "J s nm^3 (times rho2)";
  // nm^-5 * J s nm^3 * m/s = J m / nm^2 = 1e18 N
  out.force = 1e18 * out.G * sys.v_m_per_s * out.H0;
  out.quadrature_error = r.relative_error();
  out.converged = r.converged;
  return out;
}

inline FrictionResult compute(Route route, const PlateSystem& sys, const FrictionOptions& opts) {
  switch (route) {
    case Route::dilute: return friction_dilute(sys, opts);
    case Route::dense_full: return friction_dense(sys, opts);
    case Route::drude_closed_form: return friction_drude_closed_form(sys, opts);
    case Route::hybrid: {
      HybridSystem h{sys.medium1, sys.medium2.model, sys.d_nm, sys.v_m_per_s, sys.T_K};
      return friction_hybrid(h, opts);
    }
  }
  throw DomainError("unknown route");
}

}  // namespace casimir::friction
