#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "casimir/quadrature.hpp"

// Independent reference computations used by the test suite and by the
// built-in acceptance report. None of them reuses the closed forms they are
// compared against.
namespace casimir::oracles {

struct Estimate {
  double mean;
  double std_error;
};

struct PairMonteCarlo {
  Estimate s1s1;         // beta <s1^2>
  Estimate s2s2;         // beta <s2^2>
  Estimate s1s2;         // beta <s1 s2>
  Estimate fourth;       // beta^2 (<(s1 s2)^2> - <s1 s2>^2)
  Estimate wick_direct;  // beta^2 <s1^2><s2^2> from the same samples
};

/// Samples the pair weight exp(-beta [s1^2/(2 a1) + s2^2/(2 a2) + phi s1 s2])
/// by importance sampling: uncoupled Gaussians N(0, a/beta) reweighted with
/// exp(-beta phi s1 s2). Self-normalized estimates with delta-method errors.
/// Normal deviates come from a Box-Muller transform of a seeded mt19937_64,
/// so the stream is identical on every platform.
inline PairMonteCarlo sample_pair(double a1, double a2, double phi, double beta, std::size_t n,
                                  std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform = [&rng]() { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; };
  const double sd1 = std::sqrt(a1 / beta), sd2 = std::sqrt(a2 / beta);

  std::vector<double> w(n), x11(n), x22(n), x12(n), x1212(n);
  double wsum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double t = 2.0 * std::numbers::pi * uniform();
    const double s1 = sd1 * r * std::cos(t), s2 = sd2 * r * std::sin(t);
    w[i] = std::exp(-beta * phi * s1 * s2);
    wsum += w[i];
    x11[i] = beta * s1 * s1;
    x22[i] = beta * s2 * s2;
    x12[i] = beta * s1 * s2;
    x1212[i] = x12[i] * x12[i];
  }
  auto estimate = [&](const std::vector<double>& f) {
    double num = 0.0;
    for (std::size_t i = 0; i < n; ++i) num += w[i] * f[i];
    const double mean = num / wsum;
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) var += w[i] * w[i] * (f[i] - mean) * (f[i] - mean);
    return Estimate{mean, std::sqrt(var) / wsum};
  };
  PairMonteCarlo out;
  out.s1s1 = estimate(x11);
  out.s2s2 = estimate(x22);
  out.s1s2 = estimate(x12);
  const auto m2 = estimate(x1212);
  // Var(A - B^2) to first order: the error of B^2 is 2|B| err(B).
  out.fourth = {m2.mean - out.s1s2.mean * out.s1s2.mean,
                std::hypot(m2.std_error, 2.0 * out.s1s2.mean * out.s1s2.std_error)};
  out.wick_direct = {out.s1s1.mean * out.s2s2.mean,
                     std::hypot(out.s1s1.std_error * out.s2s2.mean, out.s2s2.std_error * out.s1s1.mean)};
  return out;
}

/// ln of the 2-D Gaussian pair integral, by nested adaptive quadrature over
/// a box of +-14 standard deviations of the coupled distribution.
inline double pair_log_partition(double a1, double a2, double phi, double beta) {
  const double a = a1 * a2 * phi * phi;
  const double L1 = 14.0 * std::sqrt(a1 / (beta * (1.0 - a)));
  const double L2 = 14.0 * std::sqrt(a2 / (beta * (1.0 - a)));
  const quad::QuadratureSpec spec{1e-300, 1e-13, 4000};
  auto inner = [&](double s1) {
    return quad::integrate_finite(
               [&](double s2) {
                 return std::exp(-beta * (s1 * s1 / (2.0 * a1) + s2 * s2 / (2.0 * a2) + phi * s1 * s2));
               },
               -L2, L2, spec)
        .value;
  };
  return std::log(quad::integrate_finite(inner, -L1, L1, spec).value);
}

/// d^2 ln Z / d phi^2 by a fourth-order central difference of the quadrature.
inline double pair_log_partition_curvature(double a1, double a2, double phi, double beta, double h) {
  auto f = [&](double p) { return pair_log_partition(a1, a2, p, beta); };
  return (-f(phi + 2 * h) + 16 * f(phi + h) - 30 * f(phi) + 16 * f(phi - h) - f(phi - 2 * h)) /
         (12 * h * h);
}

/// Brute-force partial sum (1/beta) sum_{|n|<=N} g(n), Kahan-compensated.
template <class G>
double brute_force_series(G&& g, double beta, long N) {
  double sum = 0.0, c = 0.0;
  for (long k = N; k >= 1; --k) {
    for (long n : {k, -k}) {
      const double y = g(n) - c;
      const double t = sum + y;
      c = (t - sum) - y;
      sum = t;
    }
  }
  return (sum + g(0L)) / beta;
}

}  // namespace casimir::oracles
