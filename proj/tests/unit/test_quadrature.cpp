#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <thread>
#include <vector>

#include "casimir/quadrature.hpp"
#include "casimir/validation/oracles.hpp"

using namespace casimir;
using std::numbers::pi;

TEST(IntegrateFinite, ExactPolynomialAndSine) {
  EXPECT_NEAR(quad::integrate_finite([](double x) { return x; }, 0.0, 1.0).value, 0.5, 1e-15);
  const auto r = quad::integrate_finite([](double x) { return std::sin(x); }, 0.0, pi);
  EXPECT_NEAR(r.value, 2.0, 1e-13);
  EXPECT_TRUE(r.converged);
}

TEST(IntegrateFinite, EndpointSingularity) {
  const auto r = quad::integrate_finite([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0);
  EXPECT_NEAR(r.value, 2.0, 1e-8);  // 2 sqrt(x) on [0, 1]
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.error_estimate, std::max(1e-10, 1e-8 * r.value));
}

TEST(IntegrateFinite, RejectsBadInterval) {
  EXPECT_THROW(quad::integrate_finite([](double) { return 1.0; }, 1.0, 1.0), DomainError);
  EXPECT_THROW(quad::integrate_finite([](double) { return 1.0; }, 0.0, 1.0, {0.0, 1e-8, 10}), DomainError);
}

TEST(IntegrateFinite, FlagsNonConvergence) {
  const quad::QuadratureSpec tight{1e-300, 1e-15, 4};
  const auto r = quad::integrate_finite([](double x) { return std::sin(1.0 / x); }, 1e-6, 1.0, tight);
  EXPECT_FALSE(r.converged);
}

TEST(IntegrateFinite, BreakpointAtNarrowPeak) {
  const double w = 1e-6, x0 = 0.3;
  auto lorentz = [&](double x) { return w / pi / ((x - x0) * (x - x0) + w * w); };
  const double exact = (std::atan((1.0 - x0) / w) + std::atan(x0 / w)) / pi;
  const std::vector<double> br{x0};
  const auto r = quad::integrate_finite(lorentz, 0.0, 1.0, {}, br);
  EXPECT_NEAR(r.value, exact, 1e-8);
}

TEST(IntegrateSemiInfinite, Examples) {
  auto r = quad::integrate_semi_infinite([](double u) { return u * u * u * std::exp(-2.0 * u); }, 1.0);
  EXPECT_NEAR(r.value, 3.0 / 8.0, 1e-10);
  r = quad::integrate_semi_infinite(
      [](double x) {
        if (x < 1e-8) return 1.0;
        const double e = std::exp(-x);
        return x * x * e / ((1.0 - e) * (1.0 - e));
      },
      1.0);
  EXPECT_NEAR(r.value, pi * pi / 3.0, 1e-8);
  r = quad::integrate_semi_infinite([](double x) { return std::exp(-x); }, 1.0);
  EXPECT_NEAR(r.value, 1.0, 1e-12);
}

TEST(IntegrateSemiInfinite, SlowDecayIsFlagged) {
  const auto r = quad::integrate_semi_infinite([](double x) { return 1.0 / (1.0 + x); }, 1.0,
                                               {1e-10, 1e-8, 200});
  EXPECT_FALSE(r.converged);
}

TEST(MatsubaraSum, Examples) {
  const double beta = 38.67;
  auto r = quad::matsubara_sum([&](long n) { return n == 0 ? beta : 0.0; }, beta);
  EXPECT_DOUBLE_EQ(r.value, 1.0);
  r = quad::matsubara_sum([&](long n) { return beta / (1.0 + static_cast<double>(n * n)); }, beta);
  // Oracle: brute-force partial sum to 1e6 plus its 2/N tail.
  const double brute =
      oracles::brute_force_series([&](long n) { return beta / (1.0 + static_cast<double>(n * n)); }, beta, 1000000) +
      2.0 / 1e6;
  EXPECT_NEAR(r.value, brute, 1e-9);
  EXPECT_NEAR(r.value, pi / std::tanh(pi), 1e-9);
  EXPECT_TRUE(r.converged);
}

TEST(MatsubaraSum, DivergentTailIsFlagged) {
  const auto r = quad::matsubara_sum([](long n) { return 1.0 / (1.0 + std::abs(static_cast<double>(n))); }, 1.0);
  EXPECT_FALSE(r.converged);
}

TEST(QuadratureProperty, GaussKronrodExactOnPolynomials) {
  // Kronrod-21 is exact to degree 31. Up to degree 19 the embedded Gauss-10
  // rule is exact too, so the error estimate vanishes and one panel suffices.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> c(static_cast<std::size_t>(1 + trial % 30));
    for (auto& x : c) x = coef(rng);
    const double a = coef(rng), b = a + 0.1 + std::abs(coef(rng));
    auto poly = [&](double x) {
      double s = 0.0;
      for (std::size_t k = c.size(); k-- > 0;) s = s * x + c[k];
      return s;
    };
    double exact = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) {
      const double p = static_cast<double>(k + 1);
      exact += c[k] * (std::pow(b, p) - std::pow(a, p)) / p;
    }
    const auto r = quad::integrate_finite(poly, a, b);
    EXPECT_NEAR(r.value, exact, 1e-13 * (1.0 + std::abs(exact)));
    if (c.size() <= 20) {
      EXPECT_EQ(r.evaluations, 21u);
    }
  }
}

TEST(QuadratureProperty, ConvergedMeansWithinTolerance) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> p(0.1, 20.0);
  for (int i = 0; i < 100; ++i) {
    const double k = p(rng);
    const quad::QuadratureSpec spec{1e-12, 1e-9, 10000};
    const auto r = quad::integrate_finite([&](double x) { return std::cos(k * x) * std::exp(-x); }, 0.0, 5.0, spec);
    ASSERT_TRUE(r.converged);
    EXPECT_LE(r.error_estimate, std::max(spec.abs_tol, spec.rel_tol * std::abs(r.value)));
    const double exact = (1.0 - std::exp(-5.0) * (std::cos(5 * k) - k * std::sin(5 * k))) / (1.0 + k * k);
    EXPECT_NEAR(r.value, exact, 1e-9);
  }
}

TEST(QuadratureProperty, RefinementReducesError) {
  auto f = [](double x) { return std::exp(std::sin(7.0 * x)) / (1.0 + x * x); };
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t n : {2u, 8u, 32u, 128u}) {
    const auto r = quad::integrate_finite(f, 0.0, 10.0, {1e-300, 1e-300, n});
    EXPECT_LE(r.error_estimate, previous);
    previous = r.error_estimate;
  }
}

TEST(QuadratureProperty, DeterministicAcrossThreads) {
  auto f = [](double x) { return std::exp(-x) * std::sin(3.0 * x) * std::sin(3.0 * x); };
  const double reference = quad::integrate_semi_infinite(f, 1.0).value;
  std::vector<double> seen(8);
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < seen.size(); ++t)
    pool.emplace_back([&, t] { seen[t] = quad::integrate_semi_infinite(f, 1.0).value; });
  for (auto& t : pool) t.join();
  for (double v : seen) EXPECT_EQ(v, reference);
}

TEST(Extrapolation, PolynomialIsRecovered) {
  const std::vector<double> x{0.4, 0.2, 0.1, 0.05};
  std::vector<double> y;
  for (double t : x) y.push_back(3.0 - 2.0 * t + 0.5 * t * t);
  EXPECT_NEAR(quad::extrapolate_to_zero(x, y, 4), 3.0, 1e-13);
}
