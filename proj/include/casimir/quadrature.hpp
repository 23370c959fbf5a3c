#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <span>
#include <tuple>
#include <utility>
#include <vector>

#include "casimir/errors.hpp"

namespace casimir::quad {

struct QuadratureSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  std::size_t max_subdivisions = 10000;

  void validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
      throw DomainError("quadrature tolerances must be positive");
    if (max_subdivisions == 0) throw DomainError("max_subdivisions must be at least 1");
  }
};

struct IntegralResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
  bool converged = true;

  double relative_error() const {
    return value != 0.0 ? error_estimate / std::abs(value) : error_estimate;
  }
};

/// Sum of two independent estimates: values and error bounds add.
inline IntegralResult operator+(const IntegralResult& a, const IntegralResult& b) {
  return {a.value + b.value, a.error_estimate + b.error_estimate, a.evaluations + b.evaluations,
          a.converged && b.converged};
}

namespace detail {

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
inline constexpr std::array<double, 11> kronrod_nodes = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};

inline constexpr std::array<double, 11> kronrod_weights = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077715266386110, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

// Gauss weights for the odd-indexed Kronrod nodes 1, 3, 5, 7, 9.
inline constexpr std::array<double, 5> gauss_weights = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const {
    // Ties broken on position so the refinement order never depends on
    // anything but the inputs.
    if (error != o.error) return error < o.error;
    return a > o.a;
  }
};

template <class F>
Panel gauss_kronrod_21(F& f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(centre);
  double kronrod = fc * kronrod_weights[10];
  double abs_sum = std::abs(kronrod);
  std::array<double, 10> f1{}, f2{};
  double gauss = 0.0;
  for (std::size_t j = 0; j < 10; ++j) {
    const double dx = half * kronrod_nodes[j];
    f1[j] = f(centre - dx);
    f2[j] = f(centre + dx);
    const double pair = f1[j] + f2[j];
    kronrod += kronrod_weights[j] * pair;
    abs_sum += kronrod_weights[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) gauss += gauss_weights[j / 2] * pair;
  }
  const double mean = 0.5 * kronrod;
  double asc = kronrod_weights[10] * std::abs(fc - mean);
  for (std::size_t j = 0; j < 10; ++j)
    asc += kronrod_weights[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));

  const double value = kronrod * half;
  asc *= std::abs(half);
  abs_sum *= std::abs(half);
  double err = std::abs((kronrod - gauss) * half);
  if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (abs_sum > std::numeric_limits<double>::min() / (50.0 * eps))
    err = std::max(50.0 * eps * abs_sum, err);
  if (!std::isfinite(value)) err = std::numeric_limits<double>::infinity();
  return {a, b, value, err};
}

}  // namespace detail

/// Neville extrapolation to x = 0 of the polynomial through the last
/// `max_points` samples (x_i, y_i).
inline double extrapolate_to_zero(const std::vector<double>& x, const std::vector<double>& y,
                                  std::size_t max_points) {
  const std::size_t n = std::min(max_points, x.size());
  const std::size_t first = x.size() - n;
  std::vector<double> p(y.begin() + static_cast<std::ptrdiff_t>(first), y.end());
  for (std::size_t m = 1; m < n; ++m)
    for (std::size_t i = 0; i + m < n; ++i) {
      const double xi = x[first + i], xj = x[first + i + m];
      p[i] = (xj * p[i] - xi * p[i + 1]) / (xj - xi);
    }
  return p[0];
}

/// Globally adaptive Gauss-Kronrod integration of f over [a, b].
///
/// The panel with the largest error estimate is bisected until the summed
/// error falls below max(abs_tol, rel_tol*|value|) or max_subdivisions panels
/// exist. Interior `breakpoints` (e.g. the location of a narrow resonance)
/// seed the initial partition. Endpoints are never evaluated, so integrable
/// endpoint singularities are allowed.
template <class F>
IntegralResult integrate_finite(F&& f, double a, double b, const QuadratureSpec& spec = {},
                                std::span<const double> breakpoints = {}) {
  spec.validate();
  if (!(a < b)) throw DomainError("integrate_finite requires a < b");

  std::vector<double> cuts{a};
  for (double p : breakpoints)
    if (p > a && p < b) cuts.push_back(p);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::priority_queue<detail::Panel> panels;
  std::size_t evaluations = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    panels.push(detail::gauss_kronrod_21(f, cuts[i], cuts[i + 1]));
    evaluations += 21;
  }

  auto totals = [&panels]() {
    // Copy-and-drain keeps the summation order fixed (error-sorted).
    auto copy = panels;
    double value = 0.0, error = 0.0;
    while (!copy.empty()) {
      value += copy.top().value;
      error += copy.top().error;
      copy.pop();
    }
    return std::pair{value, error};
  };

  auto [value, error] = totals();
  while (error > std::max(spec.abs_tol, spec.rel_tol * std::abs(value)) &&
         panels.size() < spec.max_subdivisions) {
    const detail::Panel worst = panels.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;  // exhausted floating-point resolution
    panels.pop();
    const auto left = detail::gauss_kronrod_21(f, worst.a, mid);
    const auto right = detail::gauss_kronrod_21(f, mid, worst.b);
    evaluations += 42;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
    if (panels.size() % 64 == 0) std::tie(value, error) = totals();
  }
  std::tie(value, error) = totals();
  const bool converged =
      std::isfinite(value) && error <= std::max(spec.abs_tol, spec.rel_tol * std::abs(value));
  return {value, error, evaluations, converged};
}

/// Integral of f over [0, inf).
///
/// Uses the map x = s*t/(1-t), t in [0,1), where s = decay_scale is the
/// characteristic length over which f decays. Exponential and fast algebraic
/// decay both give a bounded integrand in t; decay as slow as 1/x does not,
/// and the result is then flagged as not converged.
template <class F>
IntegralResult integrate_semi_infinite(F&& f, double decay_scale, const QuadratureSpec& spec = {},
                                       std::span<const double> breakpoints = {}) {
  if (!(decay_scale > 0.0)) throw DomainError("decay_scale must be positive");
  auto mapped = [&f, decay_scale](double t) {
    const double one_minus = 1.0 - t;
    const double x = decay_scale * t / one_minus;
    const double jacobian = decay_scale / (one_minus * one_minus);
    const double fx = f(x);
    if (fx == 0.0) return 0.0;  // avoids 0 * inf near t -> 1
    return fx * jacobian;
  };
  std::vector<double> mapped_breaks;
  for (double p : breakpoints)
    if (p > 0.0) mapped_breaks.push_back(p / (decay_scale + p));
  return integrate_finite(mapped, 0.0, 1.0, spec, mapped_breaks);
}

struct SeriesResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t terms = 0;
  bool converged = true;
};

/// (1/beta) * sum over all integers n of g(n).
///
/// Terms are paired as g(n) + g(-n). Partial sums are formed at
/// N = 96 * 2^k and extrapolated to N -> inf by Richardson (Neville)
/// extrapolation in 1/N, which removes the algebraic tail of summands that
/// decay like 1/n^2 or faster. N stays a multiple of 96, so summands carrying
/// a phase exp(-2 pi i n p/q) with q dividing 96 also extrapolate cleanly.
/// A tail decaying no faster than 1/n is reported as not converged.
template <class G>
SeriesResult matsubara_sum(G&& g, double beta, const QuadratureSpec& spec = {}) {
  spec.validate();
  if (!(beta > 0.0)) throw DomainError("beta must be positive");
  constexpr std::size_t base = 96;
  constexpr std::size_t max_levels = 15;

  // Neumaier-compensated running sum.
  double sum = g(0L), comp = 0.0;
  auto add = [&sum, &comp](double x) {
    const double t = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  };

  std::vector<double> h, partial;
  std::size_t n_done = 0;
  double previous_best = std::numeric_limits<double>::quiet_NaN();
  double previous_scaled_tail = std::numeric_limits<double>::infinity();
  int stalled_tail = 0;
  SeriesResult out;
  for (std::size_t level = 0; level < max_levels; ++level) {
    const std::size_t n_target = base << level;
    double last_pair = 0.0;
    for (long n = static_cast<long>(n_done) + 1; n <= static_cast<long>(n_target); ++n) {
      last_pair = g(n) + g(-n);
      add(last_pair);
    }
    n_done = n_target;
    out.terms = 2 * n_done + 1;

    // Tail decaying like 1/n or slower: n*|pair| does not shrink.
    const double scaled_tail = static_cast<double>(n_done) * std::abs(last_pair);
    if (scaled_tail > 0.0 && scaled_tail >= 0.7 * previous_scaled_tail) {
      if (++stalled_tail >= 3) {
        out.value = (sum + comp) / beta;
        out.error_estimate = std::numeric_limits<double>::infinity();
        out.converged = false;
        return out;
      }
    } else {
      stalled_tail = 0;
    }
    previous_scaled_tail = scaled_tail;

    h.push_back(1.0 / static_cast<double>(n_done));
    partial.push_back(sum + comp);
    const double best = extrapolate_to_zero(h, partial, 6);
    const double delta = std::abs(best - previous_best);
    if (std::isfinite(delta)) {
      out.value = best / beta;
      out.error_estimate = delta / beta;
      if (delta <= std::max(spec.abs_tol * beta, spec.rel_tol * std::abs(best))) {
        out.converged = true;
        return out;
      }
    }
    previous_best = best;
  }
  out.converged = false;
  return out;
}

}  // namespace casimir::quad
