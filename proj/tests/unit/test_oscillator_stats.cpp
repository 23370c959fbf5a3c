#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "casimir/oscillator_stats.hpp"
#include "casimir/quadrature.hpp"
#include "casimir/validation/oracles.hpp"

using namespace casimir;
using namespace casimir::oscillators;
using std::numbers::pi;

TEST(Gtilde, Examples) {
  const OscillatorSpec o{2.5, 0.7};
  EXPECT_EQ(gtilde(o, 0.0), 2.5);
  EXPECT_DOUBLE_EQ(gtilde(o, 0.7), 1.25);
  EXPECT_DOUBLE_EQ(gtilde({1.0, 2.0}, 1.0), 0.8);
  EXPECT_EQ(gtilde(o, 1.3), gtilde(o, -1.3));
  EXPECT_THROW(gtilde({0.0, 1.0}, 1.0), DomainError);
}

TEST(GImaginaryTime, Examples) {
  const OscillatorSpec o{1.5, 0.4};
  const double beta = 3.0;
  EXPECT_NEAR(g_imaginary_time(o, 0.0, beta), 0.5 * 1.5 * 0.4 / std::tanh(0.5 * beta * 0.4), 1e-14);
  EXPECT_NEAR(g_imaginary_time(o, 0.0, 1e4), 0.5 * 1.5 * 0.4, 1e-14);
  EXPECT_TRUE(std::isfinite(g_imaginary_time(o, 0.5, 1e6)));
  EXPECT_THROW(g_imaginary_time(o, -0.1, beta), DomainError);
  EXPECT_THROW(g_imaginary_time(o, beta * 1.01, beta), DomainError);
  // Symmetric about beta / 2.
  EXPECT_NEAR(g_imaginary_time(o, 0.7, beta), g_imaginary_time(o, beta - 0.7, beta), 1e-14);
}

TEST(GImaginaryTimeProperty, TransformPair) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  // The sum cancels down to exp(-beta E / 2) of its terms, so double precision
  // caps the comparable range near beta E ~ 30.
  const casimir::quad::QuadratureSpec tight{1e-13, 1e-11, 10000};
  for (int i = 0; i < 100; ++i) {
    const OscillatorSpec o{0.1 + 5.0 * u(rng), 0.01 + 2.0 * u(rng)};
    const double beta = (0.05 + 25.0 * u(rng)) / o.eigen_energy;
    const double lambda = beta * (0.05 + 0.9 * u(rng));
    const auto series = g_imaginary_time_series(o, lambda, beta, tight);
    const double closed = g_imaginary_time(o, lambda, beta);
    EXPECT_NEAR(series.value / closed, 1.0, 1e-8) << o.alpha_static << " " << o.eigen_energy << " " << beta;
  }
  // At lambda = beta/3 specifically.
  const OscillatorSpec o{1.0, 0.3};
  EXPECT_NEAR(g_imaginary_time_series(o, 10.0 / 3.0, 10.0).value / g_imaginary_time(o, 10.0 / 3.0, 10.0), 1.0,
              1e-8);
}

TEST(PairConvolution, Examples) {
  const OscillatorSpec a{1.0, 0.5};
  const double beta = 4.0;
  // Linear in alpha2. A purely relative stop sums the same terms in both.
  const quad::QuadratureSpec rel_only{1e-300, 1e-10, 10000};
  const double one = pair_convolution(a, {1.0, 0.8}, 0.0, beta, rel_only).value;
  const double tiny = pair_convolution(a, {1e-12, 0.8}, 0.0, beta, rel_only).value;
  EXPECT_NEAR(tiny / one, 1e-12, 1e-24);
  // Classical limit: the n = 0 term alpha1 alpha2 / beta dominates.
  const double hot = 1e-3;
  const auto c = pair_convolution({1.0, 1.0}, {1.0, 1.0}, 0.0, hot).value;
  const double brute =
      oracles::brute_force_series([&](long n) {
        const double k = 2.0 * pi * static_cast<double>(n) / hot;
        return gtilde({1.0, 1.0}, k) * gtilde({1.0, 1.0}, -k);
      }, hot, 1000);
  EXPECT_NEAR(c / brute, 1.0, 1e-10);
  EXPECT_NEAR(c * hot, 1.0, 1e-5);
}

TEST(PairConvolution, MatchesImaginaryTimeIntegral) {
  const OscillatorSpec a{1.3, 0.45}, b{0.7, 1.1};
  const double beta = 5.0;
  for (int k : {0, 1, 3}) {
    const double K = 2.0 * pi * k / beta;
    const auto direct = quad::integrate_finite(
        [&](double l) { return g_imaginary_time(a, l, beta) * g_imaginary_time(b, l, beta) * std::cos(K * l); }, 0.0,
        beta, {1e-15, 1e-13, 2000});
    EXPECT_NEAR(pair_convolution(a, b, K, beta).value / direct.value, 1.0, 1e-8) << k;
  }
}

TEST(PairFreeEnergy, Examples) {
  EXPECT_EQ(pair_free_energy(1.0, 2.0, 0.0, 3.0), 0.0);
  // -beta F = -ln(1 - a)/2 with a = 1/4.
  EXPECT_NEAR(pair_free_energy(1.0, 1.0, 0.5, 1.0), 0.5 * std::log(0.75), 1e-15);
  EXPECT_NEAR(pair_free_energy(1.0, 1.0, 0.5, 1.0), -0.1438, 1e-4);
  const double phi = 1e-4;
  EXPECT_NEAR(pair_free_energy(2.0, 3.0, phi, 2.0), -6.0 * phi * phi / 4.0, 1e-15);
  EXPECT_THROW(pair_free_energy(1.0, 1.0, 1.0, 1.0), InstabilityError);
  EXPECT_THROW(pair_free_energy(2.0, 2.0, 0.6, 1.0), InstabilityError);
}

TEST(PairCorrelators, Examples) {
  const auto free = pair_correlators(1.5, 2.5, 0.0, 1.0);
  EXPECT_EQ(free.s1s1, 1.5);
  EXPECT_EQ(free.s2s2, 2.5);
  EXPECT_EQ(free.s1s2, 0.0);
  const auto c = pair_correlators(1.0, 1.0, 0.5, 1.0);
  EXPECT_NEAR(c.s1s1, 4.0 / 3.0, 1e-15);
  EXPECT_NEAR(c.s2s2, 4.0 / 3.0, 1e-15);
  EXPECT_NEAR(c.s1s2, 2.0 / 3.0, 1e-15);
  const auto flipped = pair_correlators(1.0, 1.0, -0.5, 1.0);
  EXPECT_EQ(flipped.s1s1, c.s1s1);
  EXPECT_EQ(flipped.s1s2, -c.s1s2);
}

TEST(PairCorrelators, MonteCarlo) {
  const auto mc = oracles::sample_pair(1.0, 1.0, 0.5, 1.0, 1000000, 20240611);
  const auto c = pair_correlators(1.0, 1.0, 0.5, 1.0);
  EXPECT_NEAR(mc.s1s1.mean, c.s1s1, 3.0 * mc.s1s1.std_error);
  EXPECT_NEAR(mc.s2s2.mean, c.s2s2, 3.0 * mc.s2s2.std_error);
  // The weight exp(-beta phi s1 s2) makes <s1 s2> = -I' / beta.
  EXPECT_NEAR(-mc.s1s2.mean, c.s1s2, 3.0 * mc.s1s2.std_error);
}

TEST(FourthMoment, Examples) {
  const auto free = pair_fourth_moment(2.0, 3.0, 0.0, 1.0);
  EXPECT_EQ(free.uncorrelated, 6.0);
  EXPECT_EQ(free.exchange, 0.0);
  const auto f = pair_fourth_moment(1.0, 1.0, 0.5, 1.0);
  EXPECT_NEAR(f.uncorrelated, 16.0 / 9.0, 1e-15);
  EXPECT_NEAR(f.exchange, 4.0 / 9.0, 1e-15);
  EXPECT_NEAR(f.total(), 20.0 / 9.0, 1e-15);
}

TEST(FourthMoment, MatchesCurvatureOfLogPartition) {
  for (const auto& [a1, a2, phi] : {std::tuple{1.0, 1.0, 0.5}, std::tuple{0.7, 1.8, -0.3}, std::tuple{2.0, 0.4, 0.9}}) {
    const double curvature = oracles::pair_log_partition_curvature(a1, a2, phi, 1.0, 2e-3);
    EXPECT_NEAR(curvature / pair_fourth_moment(a1, a2, phi, 1.0).total(), 1.0, 1e-6);
  }
}

TEST(FourthMoment, WickFactorizationByMonteCarlo) {
  const auto mc = oracles::sample_pair(1.0, 1.0, 0.5, 1.0, 1000000, 77);
  const auto f = pair_fourth_moment(1.0, 1.0, 0.5, 1.0);
  EXPECT_NEAR(mc.fourth.mean, f.total(), 3.0 * mc.fourth.std_error);
  EXPECT_NEAR(mc.wick_direct.mean, f.uncorrelated, 3.0 * mc.wick_direct.std_error);
  // Wick: <(s1 s2)^2> - <s1 s2>^2 = <s1^2><s2^2> + <s1 s2>^2.
  const double wick = mc.wick_direct.mean + mc.s1s2.mean * mc.s1s2.mean;
  EXPECT_NEAR(mc.fourth.mean, wick, 3.0 * std::hypot(mc.fourth.std_error, mc.wick_direct.std_error));
}

TEST(PlaneCorrelators, Examples) {
  const auto probe = plane_correlators(0.0, 0.6, 0.8);
  EXPECT_EQ(probe.h11, 0.0);
  EXPECT_EQ(probe.h12, 0.0);
  EXPECT_DOUBLE_EQ(probe.h22, 0.6);
  const auto far = plane_correlators(0.3, 0.6, 60.0);
  EXPECT_DOUBLE_EQ(far.h11, 0.3);
  EXPECT_DOUBLE_EQ(far.h22, 0.6);
  EXPECT_LT(far.h12, 1e-25);
  const auto p = plane_correlators(0.5, 0.5, std::log(2.0));
  EXPECT_NEAR(p.h11, 8.0 / 15.0, 1e-15);
  EXPECT_NEAR(p.h22, 8.0 / 15.0, 1e-15);
  EXPECT_NEAR(p.h12, 2.0 / 15.0, 1e-15);
  EXPECT_THROW(plane_correlators(0.5, 0.5, 0.0), DomainError);
  EXPECT_THROW(plane_correlators(1.5, 1.5, 0.1), InstabilityError);
}

TEST(PlaneCorrelators, PairStructureOnGrid) {
  // With alpha_a -> A_a and alpha1 alpha2 phi^2 -> A1 A2 e^{-2u}, i.e.
  // phi = e^{-u}, the pair correlators are the plane correlators.
  for (double A1 : {0.1, 0.5, 0.95})
    for (double A2 : {0.2, 0.6, 0.99})
      for (double u : {0.05, 1.0, 4.0}) {
        const auto h = plane_correlators(A1, A2, u);
        const auto c = pair_correlators(A1, A2, std::exp(-u), 1.0);
        EXPECT_NEAR(h.h11, c.s1s1, 1e-14 * c.s1s1);
        EXPECT_NEAR(h.h22, c.s2s2, 1e-14 * c.s2s2);
        EXPECT_NEAR(h.h12, c.s1s2, 1e-14 * c.s1s2);
      }
}

TEST(ResonantH, Examples) {
  EXPECT_NEAR(resonant_H(1.0, 1.0, 1.0, 2.0), std::pow(1.0 / (2.0 * std::sinh(1.0)), 2), 1e-15);
  EXPECT_NEAR(resonant_H(1.0, 1.0, 1.0, 2.0), 0.1810, 1e-4);
  EXPECT_NEAR(resonant_H(2.0, 3.0, 1e-4, 1.0) / (6.0 / 1.0), 1.0, 1e-8);
  const double b = 200.0, m = 1.0;
  EXPECT_NEAR(resonant_H(2.0, 3.0, m, b) / (6.0 * m * m * std::exp(-b * m)), 1.0, 1e-12);
  EXPECT_THROW(resonant_H(1.0, 1.0, 0.0, 1.0), DomainError);
}

TEST(BroadenedOscillator, FluctuationDissipation) {
  const BroadenedOscillator osc{2.0, dielectric::Drude{9.0, 0.5}};
  const double beta = 38.67;
  for (int i = 1; i <= 20; ++i) {
    const double m = 0.5 * i;
    const double fd = dissipation_correlation(osc, m, beta);
    EXPECT_NEAR(spectral_correlation(osc, m, beta) / fd, 1.0, 1e-6) << m;
  }
}

TEST(BroadenedOscillator, EqualTimeCorrelatorTwoRoutes) {
  // A Lorentz oscillator, so the Matsubara series of phi(K) ~ 1/K^2 converges.
  const BroadenedOscillator osc{1.0, dielectric::Lorentz{0.8, 0.2, 1.0}};
  for (double beta : {0.5, 5.0, 50.0}) {
    const auto s = equal_time_from_spectrum(osc, beta, {1e-13, 1e-11, 20000});
    const auto m = equal_time_from_matsubara(osc, beta);
    EXPECT_NEAR(s.value / m.value, 1.0, 1e-6) << beta;
  }
}
