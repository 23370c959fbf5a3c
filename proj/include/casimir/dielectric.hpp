#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "casimir/errors.hpp"
#include "casimir/quadrature.hpp"

// Material response on the imaginary-frequency axis K = i*hbar*omega (eV).
//
// Dense-media response is carried as the reflection amplitude
//   A(K) = (eps - 1) / (eps + 1),
// the dimensionless object that replaces 2*pi*rho*alpha(K) in every dense
// formula. Its spectral density S(m), m = hbar*omega, obeys
//   A(K) = integral S(m) / (K^2 + m^2) d(m^2),    S(m) = -Im A(-m^2 + i0) / pi,
// so S is dimensionless and integral S(m)/m^2 d(m^2) = A(0).
namespace casimir::dielectric {

using complex = std::complex<double>;

struct Vacuum {};

/// eps = 1 - (omega_p / omega)^2.
struct Plasma {
  double plasma_energy;  // hbar*omega_p, eV
};

/// eps(K) = 1 + (hbar omega_p)^2 / (K^2 + damping*|K|).
struct Drude {
  double plasma_energy;  // hbar*omega_p, eV
  double damping;        // hbar*nu, eV
};

/// Damped oscillator given directly in reflection-amplitude form,
///   A(K) = strength * e0^2 / (K^2 + e0^2 + damping*|K|).
/// A Drude metal is the strength-1 case with e0 = hbar*omega_p/sqrt(2); a
/// dilute layer of polarizable particles has strength 2*pi*rho*alpha.
struct Lorentz {
  double resonance_energy;  // e0, eV
  double damping;           // eV
  double strength;          // A(0), in [0, 1]
};

/// Spectral density sampled on a strictly increasing m grid; linear
/// interpolation inside the table, zero outside it.
struct Tabulated {
  std::vector<double> m;         // eV
  std::vector<double> spectral;  // S(m), dimensionless
};

using PermittivityModel = std::variant<Vacuum, Plasma, Drude, Lorentz, Tabulated>;

struct MediumSpec {
  PermittivityModel model;
  std::optional<double> density_per_nm3;
  /// Static per-particle polarizability (nm^3). Only the dilute and hybrid
  /// routes read it.
  std::optional<double> polarizability_nm3;
};

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

inline std::string model_name(const PermittivityModel& model) {
  return std::visit(overloaded{[](const Vacuum&) { return std::string("vacuum"); },
                               [](const Plasma&) { return std::string("plasma"); },
                               [](const Drude&) { return std::string("drude"); },
                               [](const Lorentz&) { return std::string("lorentz"); },
                               [](const Tabulated&) { return std::string("tabulated"); }},
                    model);
}

/// e_p = hbar*omega_p / sqrt(2); e_p^2 is the numerator of A for metals.
inline double surface_energy(double plasma_energy) {
  return plasma_energy / std::numbers::sqrt2;
}

inline void validate(const PermittivityModel& model) {
  std::visit(
      overloaded{
          [](const Vacuum&) {},
          [](const Plasma& p) {
            if (!(p.plasma_energy > 0.0)) throw DomainError("plasma_energy must be positive");
          },
          [](const Drude& p) {
            if (!(p.plasma_energy > 0.0)) throw DomainError("plasma_energy must be positive");
            if (!(p.damping >= 0.0)) throw DomainError("damping must be non-negative");
          },
          [](const Lorentz& p) {
            if (!(p.resonance_energy > 0.0))
              throw DomainError("resonance_energy must be positive");
            if (!(p.damping >= 0.0)) throw DomainError("damping must be non-negative");
            if (!(p.strength >= 0.0 && p.strength <= 1.0))
              throw DomainError("strength must lie in [0, 1]");
          },
          [](const Tabulated& t) {
            if (t.m.size() != t.spectral.size() || t.m.size() < 2)
              throw DomainError("tabulated model needs at least two (m, S) samples");
            for (std::size_t i = 0; i < t.m.size(); ++i) {
              if (!(t.m[i] >= 0.0) || !std::isfinite(t.m[i]))
                throw DomainError("tabulated m must be finite and non-negative");
              if (!(t.spectral[i] >= 0.0) || !std::isfinite(t.spectral[i]))
                throw DomainError("tabulated spectral values must be finite and non-negative");
              if (i > 0 && !(t.m[i] > t.m[i - 1]))
                throw DomainError("tabulated m must be strictly increasing");
            }
          }},
      model);
}

namespace detail {

inline double interpolate(const Tabulated& t, double m) {
  if (m < t.m.front() || m > t.m.back()) return 0.0;
  const auto it = std::upper_bound(t.m.begin(), t.m.end(), m);
  if (it == t.m.end()) return t.spectral.back();
  const std::size_t i = static_cast<std::size_t>(it - t.m.begin());
  const double w = (m - t.m[i - 1]) / (t.m[i] - t.m[i - 1]);
  return (1.0 - w) * t.spectral[i - 1] + w * t.spectral[i];
}

inline quad::QuadratureSpec table_quadrature() { return {1e-13, 1e-11, 20000}; }

// f(z) = integral S(m) 2m / (z + m^2) dm over the table support.
inline complex tabulated_stieltjes(const Tabulated& t, complex z) {
  const auto spec = table_quadrature();
  auto part = [&](bool imag_part) {
    auto f = [&](double m) {
      const complex v = interpolate(t, m) * 2.0 * m / (z + m * m);
      return imag_part ? v.imag() : v.real();
    };
    return quad::integrate_finite(f, t.m.front(), t.m.back(), spec, t.m).value;
  };
  return {part(false), z.imag() == 0.0 ? 0.0 : part(true)};
}

inline complex oscillator_amplitude(double strength, double e0, double damping, complex z) {
  const double e0_sq = e0 * e0;
  return strength * e0_sq / (z + e0_sq + damping * std::sqrt(z));
}

}  // namespace detail

/// A as an analytic function of z = K^2, continued off the real axis with the
/// principal branch of sqrt(z) standing for |K|. Its boundary value from
/// above the negative axis, z = -m^2 + i0, is the retarded response.
inline complex amplitude_continued(const PermittivityModel& model, complex z) {
  validate(model);
  return std::visit(
      overloaded{[](const Vacuum&) { return complex{0.0}; },
                 [z](const Plasma& p) {
                   const double ep = surface_energy(p.plasma_energy);
                   return ep * ep / (z + ep * ep);
                 },
                 [z](const Drude& p) {
                   return detail::oscillator_amplitude(1.0, surface_energy(p.plasma_energy),
                                                       p.damping, z);
                 },
                 [z](const Lorentz& p) {
                   return detail::oscillator_amplitude(p.strength, p.resonance_energy, p.damping,
                                                       z);
                 },
                 [z](const Tabulated& t) { return detail::tabulated_stieltjes(t, z); }},
      model);
}

/// Reflection amplitude A(K) = (eps-1)/(eps+1) at real imaginary frequency K.
inline double reflection_amplitude(const PermittivityModel& model, double K) {
  return amplitude_continued(model, complex{K * K, 0.0}).real();
}

/// The quantity (2*pi*rho*alpha)_eff that replaces 2*pi*rho*alpha(K) in the
/// dense-media formulas. Identical to the reflection amplitude.
inline double dense_alpha(const PermittivityModel& model, double K) {
  return reflection_amplitude(model, K);
}

/// eps(K) on the imaginary axis. Even in K and >= 1. Plasma and Drude
/// metals return +infinity at K = 0 (perfect-conductor limit).
inline double eps_imaginary(const PermittivityModel& model, double K) {
  validate(model);
  const double k2 = K * K;
  const double abs_k = std::abs(K);
  auto metal = [&](double plasma_energy, double damping) {
    const double denom = k2 + damping * abs_k;
    if (denom == 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 + plasma_energy * plasma_energy / denom;
  };
  return std::visit(overloaded{[](const Vacuum&) { return 1.0; },
                               [&](const Plasma& p) { return metal(p.plasma_energy, 0.0); },
                               [&](const Drude& p) { return metal(p.plasma_energy, p.damping); },
                               [&](const auto&) {
                                 const double a = reflection_amplitude(model, K);
                                 if (a >= 1.0) return std::numeric_limits<double>::infinity();
                                 return (1.0 + a) / (1.0 - a);
                               }},
                    model);
}

/// eps at z = -m^2 + i*gamma, approaching the real frequency axis from the
/// retarded side. Im eps <= 0 in this convention.
inline complex eps_retarded(const PermittivityModel& model, double m,
                            std::optional<double> gamma = std::nullopt) {
  validate(model);
  if (!(m > 0.0)) throw DomainError("eps_retarded requires m > 0");
  double scale = m;
  if (const auto* p = std::get_if<Plasma>(&model)) scale = std::max(m, surface_energy(p->plasma_energy));
  if (const auto* p = std::get_if<Drude>(&model)) scale = std::max(m, surface_energy(p->plasma_energy));
  const double g = gamma.value_or(1e-6 * scale);
  if (!(g > 0.0)) throw DomainError("gamma must be positive");
  const complex z{-m * m, g};
  return std::visit(
      overloaded{[](const Vacuum&) { return complex{1.0}; },
                 [z](const Plasma& p) {
                   return 1.0 + p.plasma_energy * p.plasma_energy / z;
                 },
                 [z](const Drude& p) {
                   return 1.0 + p.plasma_energy * p.plasma_energy / (z + p.damping * std::sqrt(z));
                 },
                 [&](const auto&) {
                   const complex a = amplitude_continued(model, z);
                   return (1.0 + a) / (1.0 - a);
                 }},
      model);
}

/// Real-frequency plasma permittivity 1 - (omega_p/omega)^2 at energy hbar*omega.
inline double eps_plasma_real(const Plasma& p, double energy) {
  if (!(energy > 0.0)) throw DomainError("energy must be positive");
  const double r = p.plasma_energy / energy;
  return 1.0 - r * r;
}

/// Boundary value A(-m^2 + i0) for models with a closed-form continuation.
inline complex amplitude_retarded(const PermittivityModel& model, double m) {
  if (std::holds_alternative<Tabulated>(model))
    throw UnsupportedModel(
        "tabulated model has no closed-form continuation to the real frequency axis");
  return amplitude_continued(model, complex{-m * m, 0.0});
}

struct SpectralDensity {
  std::function<double(double)> evaluate;
  double peak_hint = 0.0;  // eV; location of the sharpest feature, 0 if none

  double operator()(double m) const { return evaluate(m); }
};

/// Discrete spectrum S(m) d(m^2) = weight * delta(m^2 - location^2) d(m^2).
struct DeltaLine {
  double location;  // eV
  double weight;    // eV^2
};

using Spectrum = std::variant<SpectralDensity, DeltaLine>;

namespace detail {

inline SpectralDensity oscillator_spectrum(double strength, double e0, double damping) {
  const double e0_sq = e0 * e0;
  return {[=](double m) {
            const double x = e0_sq - m * m;
            const double y = damping * m;
            if (y == 0.0) return 0.0;
            return strength * e0_sq / std::numbers::pi * y / (x * x + y * y);
          },
          e0};
}

}  // namespace detail

/// Spectral density of A. Undamped metals (Plasma, or Drude with zero
/// damping) have a single delta line at the surface-plasmon energy.
inline Spectrum spectral_density(const PermittivityModel& model) {
  validate(model);
  return std::visit(
      overloaded{
          [](const Vacuum&) -> Spectrum { return SpectralDensity{[](double) { return 0.0; }, 0.0}; },
          [](const Plasma& p) -> Spectrum {
            const double ep = surface_energy(p.plasma_energy);
            return DeltaLine{ep, ep * ep};
          },
          [](const Drude& p) -> Spectrum {
            const double ep = surface_energy(p.plasma_energy);
            if (p.damping == 0.0) return DeltaLine{ep, ep * ep};
            return detail::oscillator_spectrum(1.0, ep, p.damping);
          },
          [](const Lorentz& p) -> Spectrum {
            const double e0 = p.resonance_energy;
            if (p.damping == 0.0) return DeltaLine{e0, p.strength * e0 * e0};
            return detail::oscillator_spectrum(p.strength, e0, p.damping);
          },
          [](const Tabulated& t) -> Spectrum {
            const auto peak = std::max_element(t.spectral.begin(), t.spectral.end());
            const double hint = t.m[static_cast<std::size_t>(peak - t.spectral.begin())];
            return SpectralDensity{[t](double m) { return detail::interpolate(t, m); }, hint};
          }},
      model);
}

/// The continuous spectral density, or DeltaLineError if the model only has
/// a discrete line.
inline SpectralDensity continuous_spectrum(const PermittivityModel& model) {
  auto s = spectral_density(model);
  if (const auto* line = std::get_if<DeltaLine>(&s)) {
    std::ostringstream msg;
    msg << model_name(model) << " model has a delta-line spectrum at m = " << line->location
        << " eV; friction needs overlapping continuous spectra (two discrete lines only "
           "contribute through delta(omega1 - omega2))";
    throw DeltaLineError(msg.str());
  }
  return std::get<SpectralDensity>(std::move(s));
}

/// -Im A(-m^2 + i*gamma)/pi extrapolated to gamma -> 0 from
/// gamma in {1e-4, 1e-5, 1e-6} * scale^2 (Neville extrapolation in gamma;
/// gamma is an offset in z = K^2, hence eV^2). `scale` defaults to
/// max(m, e0) where e0 is the model's resonance energy; near m -> 0 pass
/// scale = m so gamma stays small against m^2.
inline double spectral_from_retarded(const PermittivityModel& model, double m,
                                     std::optional<double> scale = std::nullopt) {
  if (!(m > 0.0)) throw DomainError("spectral_from_retarded requires m > 0");
  double s = m;
  if (!scale) {
    std::visit(overloaded{[&](const Plasma& p) { s = std::max(m, surface_energy(p.plasma_energy)); },
                          [&](const Drude& p) { s = std::max(m, surface_energy(p.plasma_energy)); },
                          [&](const Lorentz& p) { s = std::max(m, p.resonance_energy); },
                          [](const auto&) {}},
               model);
  } else {
    s = *scale;
  }
  std::vector<double> gammas, values;
  for (double f : {1e-4, 1e-5, 1e-6}) {
    const double g = f * s * s;
    gammas.push_back(g);
    values.push_back(-amplitude_continued(model, complex{-m * m, g}).imag() / std::numbers::pi);
  }
  return quad::extrapolate_to_zero(gammas, values, gammas.size());
}

/// Energy hbar*omega_p/sqrt(2) of the surface plasma wave.
inline double surface_plasmon_frequency(const PermittivityModel& model) {
  const auto* p = std::get_if<Plasma>(&model);
  if (!p) throw UnsupportedModel("surface_plasmon_frequency needs a plasma model, got " +
                                 model_name(model));
  validate(model);
  return surface_energy(p->plasma_energy);
}

/// Parses a two-column (m_eV, S) table. '#' starts a comment; columns may be
/// separated by whitespace or a comma.
inline Tabulated parse_tabulated(std::istream& in, const std::string& source = "table") {
  Tabulated t;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    double m = 0.0, s = 0.0;
    if (!(fields >> m)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw ConfigError(source + ":" + std::to_string(line_no), "expected two numeric columns");
    }
    if (!(fields >> s))
      throw ConfigError(source + ":" + std::to_string(line_no), "missing spectral column");
    std::string extra;
    if (fields >> extra)
      throw ConfigError(source + ":" + std::to_string(line_no), "unexpected third column");
    if (!t.m.empty() && !(m > t.m.back()))
      throw ConfigError(source + ":" + std::to_string(line_no),
                        "first column must be strictly increasing");
    if (!(s >= 0.0))
      throw ConfigError(source + ":" + std::to_string(line_no),
                        "spectral values must be non-negative");
    t.m.push_back(m);
    t.spectral.push_back(s);
  }
  if (t.m.size() < 2) throw ConfigError(source, "table needs at least two rows");
  return t;
}

inline Tabulated load_tabulated(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open tabulated model file");
  return parse_tabulated(in, path);
}

}  // namespace casimir::dielectric
