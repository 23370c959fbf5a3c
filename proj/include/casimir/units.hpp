#pragma once

#include <cmath>

#include "casimir/errors.hpp"

// Unit conventions used throughout the library:
//   energy       eV   (hbar*omega, k_B*T, imaginary frequency K)
//   inverse temp eV^-1
//   length       nm at the API, metres only inside force prefactors
//   velocity     m/s
//   temperature  K
//   force/area   Pa
namespace casimir::units {

struct Constants {
  double hbar_J_s = 1.054571817e-34;
  double boltzmann_eV_per_K = 8.617333262e-5;
  double vacuum_permittivity_SI = 8.8541878128e-12;  // A s / (V m)
  double joule_per_eV = 1.602176634e-19;
};

inline constexpr Constants codata{};

inline constexpr double metres_per_nm = 1e-9;

inline constexpr double nm_to_m(double length_nm) { return length_nm * metres_per_nm; }

/// k_B T in eV.
inline double thermal_energy(double temperature_K, const Constants& c = codata) {
  if (!(temperature_K > 0.0) || !std::isfinite(temperature_K))
    throw DomainError("temperature must be positive and finite (got " +
                      std::to_string(temperature_K) + " K)");
  return c.boltzmann_eV_per_K * temperature_K;
}

/// 1 / (k_B T) in eV^-1.
inline double beta(double temperature_K, const Constants& c = codata) {
  return 1.0 / thermal_energy(temperature_K, c);
}

/// Energy in eV converted to an angular frequency in s^-1.
inline double angular_frequency(double energy_eV, const Constants& c = codata) {
  return energy_eV * c.joule_per_eV / c.hbar_J_s;
}

}  // namespace casimir::units
