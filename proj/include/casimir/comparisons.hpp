#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>

#include "casimir/dielectric.hpp"
#include "casimir/errors.hpp"
#include "casimir/units.hpp"

// Literature benchmarks for plate-plate friction between Drude metals. Both
// conductivity conventions below derive from the single Drude pair
// (hbar omega_p, hbar nu) through omega_p^2 / nu.
namespace casimir::comparisons {

/// omega_p^2 / nu in s^-1. Equals sigma/eps0 in SI and 4 pi sigma in Gaussian units.
inline double conductivity_rate(const dielectric::Drude& m, const units::Constants& c = units::codata) {
  dielectric::validate(m);
  if (!(m.damping > 0.0)) throw DomainError("conductivity needs non-zero damping");
  return units::angular_frequency(m.plasma_energy * m.plasma_energy / m.damping, c);
}

/// Drude model with a prescribed omega_p^2/nu (s^-1) and damping (eV).
inline dielectric::Drude drude_from_conductivity(double rate_per_s, double damping_eV,
                                                 const units::Constants& c = units::codata) {
  if (!(rate_per_s > 0.0) || !(damping_eV > 0.0))
    throw DomainError("conductivity rate and damping must be positive");
  const double hbar_eV_s = c.hbar_J_s / c.joule_per_eV;
  return {std::sqrt(hbar_eV_s * rate_per_s * damping_eV), damping_eV};
}

struct PendryInput {
  double conductivity_over_eps0;  // s^-1
  double d_m;
  double v_m_per_s;
};

/// F_P = 5 hbar eps0^2 v^3 / (2^8 pi^2 sigma^2 d^6), in Pa.
inline double pendry_force(const PendryInput& in, const units::Constants& c = units::codata) {
  if (!(in.conductivity_over_eps0 > 0.0) || !(in.d_m > 0.0) || !(in.v_m_per_s >= 0.0))
    throw DomainError("Pendry input must be positive");
  const double rate = in.conductivity_over_eps0;
  return 5.0 * c.hbar_J_s * std::pow(in.v_m_per_s, 3) /
         (256.0 * std::numbers::pi * std::numbers::pi * rate * rate * std::pow(in.d_m, 6));
}

/// F / F_P = (64 pi^2 / 5) (k_B T / (hbar v / d))^2.
inline double ratio_to_pendry(double T_K, double v_m_per_s, double d_m,
                              const units::Constants& c = units::codata) {
  if (!(v_m_per_s > 0.0) || !(d_m > 0.0)) throw DomainError("v and d must be positive");
  const double kT_J = units::thermal_energy(T_K, c) * c.joule_per_eV;
  const double x = kT_J * d_m / (c.hbar_J_s * v_m_per_s);
  return 64.0 * std::numbers::pi * std::numbers::pi / 5.0 * x * x;
}

struct VPInput {
  double four_pi_sigma;  // s^-1, Gaussian units
  double d_m;
  double T_K;
  double v_m_per_s;
};

struct VPResult {
  double coefficient;  // kg s^-1 m^-2
  double force;        // Pa
};

/// gamma = 0.3 (hbar / d^4) (k_B T / (4 pi hbar sigma))^2, force = gamma v.
inline VPResult vp_friction(const VPInput& in, const units::Constants& c = units::codata) {
  if (!(in.four_pi_sigma > 0.0) || !(in.d_m > 0.0) || !(in.v_m_per_s >= 0.0))
    throw DomainError("VP input must be positive");
  const double kT_J = units::thermal_energy(in.T_K, c) * c.joule_per_eV;
  const double x = kT_J / (c.hbar_J_s * in.four_pi_sigma);
  const double gamma = 0.3 * c.hbar_J_s / std::pow(in.d_m, 4) * x * x;
  return {gamma, gamma * in.v_m_per_s};
}

struct ZetaResult {
  double value;
  double tail_bound;  // |zeta(3) - value|
  std::size_t terms;
};

/// sum_{n<=N} 1/n^3 plus the Euler-Maclaurin tail 1/(2N^2) - 1/(2N^3) + 1/(4N^4),
/// whose error is below 1/(4 N^6) (next term of the expansion, with margin).
/// With N = 1 and `with_tail` false this is the bare partial sum 1.
inline ZetaResult zeta3_factor(std::size_t terms = 64, bool with_tail = true) {
  if (terms == 0) throw DomainError("need at least one term");
  double sum = 0.0;
  for (std::size_t n = terms; n >= 1; --n) {  // smallest first
    const double x = static_cast<double>(n);
    sum += 1.0 / (x * x * x);
  }
  const double N = static_cast<double>(terms);
  if (!with_tail) return {sum, 1.0 / (2.0 * N * N), terms};
  const double tail = 1.0 / (2.0 * N * N) - 1.0 / (2.0 * N * N * N) + 1.0 / (4.0 * std::pow(N, 4));
  return {sum + tail, 1.0 / (4.0 * std::pow(N, 6)), terms};
}

}  // namespace casimir::comparisons
