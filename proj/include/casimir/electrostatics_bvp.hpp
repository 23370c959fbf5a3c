#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "casimir/errors.hpp"

// Electrostatics of a unit point charge at z0 < 0 in front of two
// half-planes: permittivity eps1 for z < 0, vacuum gap 0 < z < d, eps2 for
// z > d. After the xy transform the potential is, with prefactor
// (2 pi / q) exp(q z0),
//   z < z0       : exp(-2 q z0) exp(q z) / eps1 + B exp(q z)
//   z0 < z < 0   : exp(-q z) / eps1 + B exp(q z)
//   0 < z < d    : C exp(-q z) + C1 exp(q z)
//   d < z        : D exp(-q z)
namespace casimir::bvp {

/// Permittivities at one (imaginary or real) frequency. Values below 1 are
/// allowed so that real-frequency plasma values near the surface pole can be
/// probed; eps = -1 is singular.
struct LayeredConfig {
  double eps1;
  double eps2;
  double d;   // nm
  double q;   // nm^-1
  double z0;  // nm, < 0

  void validate() const {
    if (!(d > 0.0)) throw DomainError("d must be positive");
    if (!(q > 0.0)) throw DomainError("q must be positive");
    if (!(z0 < 0.0)) throw DomainError("source position z0 must be negative");
    if (!std::isfinite(eps1) || !std::isfinite(eps2))
      throw DomainError("permittivities must be finite");
  }
  double u() const { return q * d; }
};

struct BoundarySolution {
  double B, C, C1, D;
};

inline double reflection(double eps) { return (eps - 1.0) / (eps + 1.0); }

namespace detail {
inline void guard_pole(double eps, const char* which) {
  if (std::abs(eps + 1.0) <= 64.0 * std::numeric_limits<double>::epsilon() * std::abs(eps))
    throw SingularityError(std::string(which) +
                           " = -1: surface-mode pole, the boundary problem has no solution");
}
}  // namespace detail

/// Closed-form coefficients:
///   D  = 4 / ((eps1+1)(eps2+1) - (eps1-1)(eps2-1) e^{-2u})
///      = 4 / ((eps1+1)(eps2+1)(1 - A1 A2 e^{-2u})),
///   B  = A1/eps1 - (eps2-1)/(eps1+1) D e^{-2u},
///   C  = D (1+eps2)/2,  C1 = D (1-eps2) e^{-2u} / 2.
inline BoundarySolution solve_layers(const LayeredConfig& c) {
  c.validate();
  detail::guard_pole(c.eps1, "eps1");
  detail::guard_pole(c.eps2, "eps2");
  const double e2u = std::exp(-2.0 * c.u());
  const double denom = (c.eps1 + 1.0) * (c.eps2 + 1.0) - (c.eps1 - 1.0) * (c.eps2 - 1.0) * e2u;
  if (denom == 0.0) throw SingularityError("coupled-surface pole: D diverges");
  const double D = 4.0 / denom;
  const double B = reflection(c.eps1) / c.eps1 - (c.eps2 - 1.0) / (c.eps1 + 1.0) * D * e2u;
  return {B, D * (1.0 + c.eps2) / 2.0, D * (1.0 - c.eps2) * e2u / 2.0, D};
}

/// The four continuity conditions as a linear system in (B, C, C1, D), with
/// the conditions at z = d multiplied through by exp(q d).
inline std::pair<Eigen::Matrix4d, Eigen::Vector4d> boundary_system(const LayeredConfig& c) {
  const double g = std::exp(2.0 * c.u());
  Eigen::Matrix4d m;
  // clang-format off
  m << -1.0,   1.0, 1.0,  0.0,
       c.eps1, 1.0, -1.0, 0.0,
       0.0,    1.0, g,    -1.0,
       0.0,    1.0, -g,   -c.eps2;
  // clang-format on
  Eigen::Vector4d rhs(1.0 / c.eps1, 1.0, 0.0, 0.0);
  return {m, rhs};
}

/// Generic LU solve of the boundary system.
inline BoundarySolution solve_layers_linear(const LayeredConfig& c) {
  c.validate();
  const auto [m, rhs] = boundary_system(c);
  Eigen::FullPivLU<Eigen::Matrix4d> lu(m);
  if (!lu.isInvertible()) throw SingularityError("boundary system is singular");
  const Eigen::Vector4d x = lu.solve(rhs);
  return {x[0], x[1], x[2], x[3]};
}

/// Residuals of the four continuity equations, each relative to the largest
/// term in that equation.
inline std::array<double, 4> boundary_residuals(const LayeredConfig& c, const BoundarySolution& s) {
  const double e = std::exp(-c.u());
  const double ep = std::exp(c.u());
  auto rel = [](double r, std::initializer_list<double> terms) {
    double scale = 0.0;
    for (double t : terms) scale = std::max(scale, std::abs(t));
    return scale > 0.0 ? std::abs(r) / scale : std::abs(r);
  };
  return {
      rel(1.0 / c.eps1 + s.B - s.C - s.C1, {1.0 / c.eps1, s.B, s.C, s.C1}),
      rel(c.eps1 * (1.0 / c.eps1 - s.B) - (s.C - s.C1), {1.0, c.eps1 * s.B, s.C, s.C1}),
      rel(s.C * e + s.C1 * ep - s.D * e, {s.C * e, s.C1 * ep, s.D * e}),
      rel(s.C * e - s.C1 * ep - c.eps2 * s.D * e, {s.C * e, s.C1 * ep, c.eps2 * s.D * e}),
  };
}

/// psi^(z, q) for the four regions.
inline double potential_profile(const LayeredConfig& c, const BoundarySolution& s, double z) {
  const double pre = 2.0 * std::numbers::pi / c.q * std::exp(c.q * c.z0);
  const double q = c.q;
  if (z < c.z0) return pre * (std::exp(-2.0 * q * c.z0) * std::exp(q * z) / c.eps1 + s.B * std::exp(q * z));
  if (z < 0.0) return pre * (std::exp(-q * z) / c.eps1 + s.B * std::exp(q * z));
  if (z < c.d) return pre * (s.C * std::exp(-q * z) + s.C1 * std::exp(q * z));
  return pre * s.D * std::exp(-q * z);
}

/// eps * d psi^/dz on either side of a point, for checking flux continuity.
inline double displacement_profile(const LayeredConfig& c, const BoundarySolution& s, double z) {
  const double pre = 2.0 * std::numbers::pi / c.q * std::exp(c.q * c.z0);
  const double q = c.q;
  if (z < c.z0)
    return c.eps1 * pre * q * (std::exp(-2.0 * q * c.z0) * std::exp(q * z) / c.eps1 + s.B * std::exp(q * z));
  if (z < 0.0) return c.eps1 * pre * q * (-std::exp(-q * z) / c.eps1 + s.B * std::exp(q * z));
  if (z < c.d) return pre * q * (-s.C * std::exp(-q * z) + s.C1 * std::exp(q * z));
  return c.eps2 * pre * -q * s.D * std::exp(-q * z);
}

struct DenominatorCheck {
  double from_D;        // 4 / ((eps1+1)(eps2+1) D)
  double from_formula;  // 1 - A1 A2 exp(-2u)
};

inline DenominatorCheck denominator_check(const LayeredConfig& c) {
  const auto s = solve_layers(c);
  return {4.0 / ((c.eps1 + 1.0) * (c.eps2 + 1.0) * s.D),
          1.0 - reflection(c.eps1) * reflection(c.eps2) * std::exp(-2.0 * c.u())};
}

}  // namespace casimir::bvp
