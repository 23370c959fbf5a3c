#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include "casimir/dielectric.hpp"
#include "casimir/errors.hpp"
#include "casimir/quadrature.hpp"

// Harmonic-oscillator correlation functions in imaginary time and on the
// Matsubara axis, the coupled-pair Gaussian statistics, and the half-plane
// correlators that carry the dense-media denominators.
namespace casimir::oscillators {

struct OscillatorSpec {
  double alpha_static;  // nm^3
  double eigen_energy;  // hbar*omega_a, eV

  void validate() const {
    if (!(alpha_static > 0.0)) throw DomainError("alpha_static must be positive");
    if (!(eigen_energy > 0.0)) throw DomainError("eigen_energy must be positive");
  }
};

/// g~(K) = alpha E^2 / (K^2 + E^2).
inline double gtilde(const OscillatorSpec& osc, double K) {
  osc.validate();
  const double e2 = osc.eigen_energy * osc.eigen_energy;
  return osc.alpha_static * e2 / (K * K + e2);
}

/// Imaginary-time correlator
///   g(lambda) = (alpha E / 2) cosh((beta/2 - lambda) E) / sinh(beta E / 2),
/// 0 <= lambda <= beta. Written with decaying exponentials so large beta*E
/// does not overflow.
inline double g_imaginary_time(const OscillatorSpec& osc, double lambda, double beta) {
  osc.validate();
  if (!(beta > 0.0)) throw DomainError("beta must be positive");
  if (!(lambda >= 0.0 && lambda <= beta))
    throw DomainError("lambda must lie in [0, beta]; the periodic extension is not provided");
  const double e = osc.eigen_energy;
  const double num = std::exp(-lambda * e) + std::exp(-(beta - lambda) * e);
  return 0.5 * osc.alpha_static * e * num / -std::expm1(-beta * e);
}

/// (1/beta) sum_n g~(K_n) exp(-i K_n lambda), K_n = 2 pi n / beta: the
/// Matsubara-series route to g(lambda).
inline quad::SeriesResult g_imaginary_time_series(const OscillatorSpec& osc, double lambda,
                                                  double beta, const quad::QuadratureSpec& spec = {}) {
  osc.validate();
  if (!(beta > 0.0)) throw DomainError("beta must be positive");
  const double step = 2.0 * std::numbers::pi / beta;
  const double a = osc.alpha_static, e2 = osc.eigen_energy * osc.eigen_energy;
  // The alpha E^2 / K^2 tail oscillates with lambda and defeats extrapolation;
  // its cosine sum is a Bernoulli polynomial in f = lambda / beta, so only the
  // 1/K^4 remainder is summed term by term.
  const double f = lambda / beta - std::floor(lambda / beta);
  const double tail = a * e2 * beta * beta * (6.0 * f * f - 6.0 * f + 1.0) / 12.0;
  // Folding it into n = 0 keeps the stopping rule relative to the full value.
  return quad::matsubara_sum(
      [&](long n) {
        if (n == 0) return a + tail;
        const double k = step * static_cast<double>(n);
        return -a * e2 * e2 / (k * k * (k * k + e2)) * std::cos(k * lambda);
      },
      beta, spec);
}

/// (1/beta) sum_{K0} g~1(K0) g~2(K - K0). For Matsubara K this is the
/// transform of g1(lambda) g2(lambda).
inline quad::SeriesResult pair_convolution(const OscillatorSpec& osc1, const OscillatorSpec& osc2,
                                           double K, double beta,
                                           const quad::QuadratureSpec& spec = {}) {
  osc1.validate();
  osc2.validate();
  const double step = 2.0 * std::numbers::pi / beta;
  return quad::matsubara_sum(
      [&](long n) {
        const double k0 = step * static_cast<double>(n);
        return gtilde(osc1, k0) * gtilde(osc2, K - k0);
      },
      beta, spec);
}

namespace detail {
inline double coupling_product(double alpha1, double alpha2, double phi, double beta) {
  if (!(beta > 0.0)) throw DomainError("beta must be positive");
  if (!(alpha1 > 0.0) || !(alpha2 > 0.0)) throw DomainError("polarizabilities must be positive");
  const double a = alpha1 * alpha2 * phi * phi;
  if (!(a < 1.0))
    throw InstabilityError("alpha1*alpha2*phi^2 = " + std::to_string(a) +
                           " >= 1: the Gaussian pair integral diverges");
  return a;
}
}  // namespace detail

/// Free-energy change of the coupled pair, F = ln(1 - alpha1 alpha2 phi^2) / (2 beta).
inline double pair_free_energy(double alpha1, double alpha2, double phi, double beta) {
  const double a = detail::coupling_product(alpha1, alpha2, phi, beta);
  return std::log1p(-a) / (2.0 * beta);
}

struct PairCorrelators {
  double s1s1;  // beta <s1^2>
  double s2s2;  // beta <s2^2>
  double s1s2;  // beta <s1 s2>, as I' = d ln Z / d phi
};

inline PairCorrelators pair_correlators(double alpha1, double alpha2, double phi, double beta) {
  const double a = detail::coupling_product(alpha1, alpha2, phi, beta);
  const double inv = 1.0 / (1.0 - a);
  return {alpha1 * inv, alpha2 * inv, alpha1 * alpha2 * phi * inv};
}

struct FourthMoment {
  double uncorrelated;  // beta^2 <s1^2><s2^2>
  double exchange;      // beta^2 <s1 s2>^2
  double total() const { return uncorrelated + exchange; }
};

/// beta^2 (<s1 s2 s1 s2> - <s1 s2>^2) split into its two Wick pairings.
inline FourthMoment pair_fourth_moment(double alpha1, double alpha2, double phi, double beta) {
  const auto c = pair_correlators(alpha1, alpha2, phi, beta);
  return {c.s1s1 * c.s2s2, c.s1s2 * c.s1s2};
}

/// Correlators of two half-planes in reflection-amplitude normalization:
///   h11 = 2 pi rho1 h~11, h22 = 2 pi rho2 h~22, h12 = 2 pi sqrt(rho1 rho2) h~12.
/// Templated so the same code serves real K and the retarded continuation.
template <class T>
struct PlaneCorrelators {
  T h11, h22, h12;
  double u;
};

template <class T>
PlaneCorrelators<T> plane_correlators(T A1, T A2, double u) {
  if (!(u > 0.0)) throw DomainError("u must be positive");
  const double decay = std::exp(-u);
  const T coupling = A1 * A2 * (decay * decay);
  const T denom = T(1.0) - coupling;
  if (std::abs(denom) == 0.0 ||
      (std::is_floating_point_v<T> && !(std::real(denom) > 0.0)))
    throw InstabilityError("1 - A1*A2*exp(-2u) must be positive");
  return {A1 / denom, A2 / denom, A1 * A2 * decay / denom, u};
}

/// Resonant kernel H = (m / (2 sinh(beta m / 2)))^2 alpha1 alpha2.
inline double resonant_H(double alpha1, double alpha2, double m, double beta) {
  if (!(m > 0.0)) throw DomainError("resonant_H requires m > 0");
  if (!(beta > 0.0)) throw DomainError("beta must be positive");
  const double x = 0.5 * beta * m;
  // m/(2 sinh x) = m e^{-x} / (1 - e^{-2x})
  const double r = m * std::exp(-x) / -std::expm1(-2.0 * x);
  return r * r * alpha1 * alpha2;
}

/// An oscillator whose eigenfrequencies are spread over the spectrum of a
/// dielectric model: phi(K) = alpha * A(K) / A(0).
struct BroadenedOscillator {
  double alpha_static;  // nm^3
  dielectric::PermittivityModel model;

  double normalization() const {
    const double a0 = dielectric::reflection_amplitude(model, 0.0);
    if (!(a0 > 0.0)) throw DomainError("broadened oscillator needs a model with A(0) > 0");
    return alpha_static / a0;
  }
  double response(double K) const {
    return normalization() * dielectric::reflection_amplitude(model, K);
  }
  std::complex<double> retarded(double m) const {
    return normalization() * dielectric::amplitude_retarded(model, m);
  }
  /// Per-particle spectral function alpha_I(m^2) m^2.
  double spectral(double m) const {
    return normalization() * dielectric::continuous_spectrum(model)(m);
  }
};

namespace detail {
inline double coth_half(double beta, double m) {
  return 1.0 / std::tanh(0.5 * beta * m);
}
}  // namespace detail

/// Spectral correlation <s s>_m rebuilt from the equal-time integrand,
/// pi * alpha_I(m^2) m^2 * coth(beta m / 2).
inline double spectral_correlation(const BroadenedOscillator& osc, double m, double beta) {
  if (!(m > 0.0)) throw DomainError("spectral_correlation requires m > 0");
  return std::numbers::pi * osc.spectral(m) * detail::coth_half(beta, m);
}

/// Response side of the fluctuation-dissipation relation,
/// -Im phi(m) * coth(beta m / 2), with phi continued to the real axis.
inline double dissipation_correlation(const BroadenedOscillator& osc, double m, double beta) {
  if (!(m > 0.0)) throw DomainError("dissipation_correlation requires m > 0");
  return -osc.retarded(m).imag() * detail::coth_half(beta, m);
}

/// g(0) = integral alpha_I(m^2) m^2 coth(beta m / 2) dm.
inline quad::IntegralResult equal_time_from_spectrum(const BroadenedOscillator& osc, double beta,
                                                     const quad::QuadratureSpec& spec = {}) {
  const auto s = dielectric::continuous_spectrum(osc.model);
  const double norm = osc.normalization();
  const double peak = s.peak_hint;
  const double breaks[] = {peak};
  return quad::integrate_semi_infinite(
      [&](double m) {
        if (m == 0.0) return 0.0;
        return norm * s(m) * detail::coth_half(beta, m);
      },
      peak > 0.0 ? peak : 1.0 / beta, spec, std::span<const double>(breaks, peak > 0.0 ? 1 : 0));
}

/// g(0) = (1/beta) sum_n phi(K_n).
inline quad::SeriesResult equal_time_from_matsubara(const BroadenedOscillator& osc, double beta,
                                                    const quad::QuadratureSpec& spec = {}) {
  const double step = 2.0 * std::numbers::pi / beta;
  const double norm = osc.normalization();
  return quad::matsubara_sum(
      [&](long n) {
        return norm * dielectric::reflection_amplitude(osc.model, step * static_cast<double>(n));
      },
      beta, spec);
}

}  // namespace casimir::oscillators
