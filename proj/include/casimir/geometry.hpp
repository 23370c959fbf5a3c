#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "casimir/errors.hpp"
#include "casimir/quadrature.hpp"

// Dipole interaction kernels and the geometric factors obtained by
// integrating squared force tensors over particle positions. Lengths in nm.
namespace casimir::geometry {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// T[l](i, j) = T_lij.
using ForceTensor = std::array<Mat3, 3>;

namespace detail {
inline double checked_norm(const Vec3& r) {
  const double n = r.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw SingularityError("dipole kernels need r != 0");
  return n;
}
inline void require_positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x))
    throw DomainError(std::string(what) + " must be positive and finite");
}
}  // namespace detail

/// psi_ij = d_i d_j (1/r) = -(3 x_i x_j / r^5 - delta_ij / r^3).
inline Mat3 dipole_tensor(const Vec3& r) {
  const double n = detail::checked_norm(r);
  const double r3 = n * n * n;
  const double r5 = r3 * n * n;
  return -(3.0 * r * r.transpose() / r5 - Mat3::Identity() / r3);
}

/// T_lij = d_l psi_ij
///       = 15 x_i x_j x_l / r^7 - 3 (delta_li x_j + delta_lj x_i + delta_ij x_l) / r^5.
inline ForceTensor force_tensor(const Vec3& r) {
  const double n = detail::checked_norm(r);
  const double r2 = n * n;
  const double r5 = r2 * r2 * n;
  const double r7 = r5 * r2;
  ForceTensor t;
  for (int l = 0; l < 3; ++l)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double v = 15.0 * r[i] * r[j] * r[l] / r7;
        v -= 3.0 * ((l == i ? r[j] : 0.0) + (l == j ? r[i] : 0.0) + (i == j ? r[l] : 0.0)) / r5;
        t[static_cast<std::size_t>(l)](i, j) = v;
      }
  return t;
}

/// G_lq = T_lij T_qij.
inline double contracted_force(const ForceTensor& t, int l, int q) {
  return t[static_cast<std::size_t>(l)].cwiseProduct(t[static_cast<std::size_t>(q)]).sum();
}

/// psi^(z, k_perp) = 2 pi exp(-k_perp |z|) / k_perp: the Coulomb potential
/// transformed in x and y only.
inline double coulomb_kernel_hat(double z, double k_perp) {
  if (!(k_perp > 0.0)) throw SingularityError("k_perp = 0 is the singular uniform mode");
  return 2.0 * std::numbers::pi * std::exp(-k_perp * std::abs(z)) / k_perp;
}

/// Same kernel from the inverse k_z transform of 4 pi / k^2,
///   (1/pi) integral_0^inf 4 pi cos(k_z z) / (k_perp^2 + k_z^2) dk_z.
/// Integrated over whole periods of cos(k_z z) and extrapolated in the
/// cut-off, since the tail falls off as a power of the cut-off.
inline quad::IntegralResult coulomb_kernel_from_fourier(double z, double k_perp,
                                                        const quad::QuadratureSpec& spec = {}) {
  if (!(k_perp > 0.0)) throw SingularityError("k_perp = 0 is the singular uniform mode");
  const double az = std::abs(z);
  auto f = [&](double kz) { return 4.0 * std::cos(kz * az) / (k_perp * k_perp + kz * kz); };
  if (az == 0.0) {
    auto r = quad::integrate_semi_infinite(f, k_perp, spec);
    return r;
  }
  const double period = 2.0 * std::numbers::pi / az;
  std::vector<double> inv_cut, partial;
  quad::IntegralResult acc{0.0, 0.0, 0, true};
  double lo = 0.0;
  double best = 0.0, previous = std::numeric_limits<double>::quiet_NaN();
  const quad::QuadratureSpec panel_spec{spec.abs_tol * 1e-3, spec.rel_tol * 1e-2,
                                        spec.max_subdivisions};
  for (int level = 0; level < 12; ++level) {
    const double hi = period * static_cast<double>(std::size_t{8} << level);
    acc = acc + quad::integrate_finite(f, lo, hi, panel_spec);
    lo = hi;
    inv_cut.push_back(1.0 / hi);
    partial.push_back(acc.value);
    best = quad::extrapolate_to_zero(inv_cut, partial, 5);
    if (std::abs(best - previous) <= std::max(spec.abs_tol, spec.rel_tol * std::abs(best))) {
      return {best, std::abs(best - previous) + acc.error_estimate, acc.evaluations, acc.converged};
    }
    previous = best;
  }
  return {best, std::abs(best - previous), acc.evaluations, false};
}

/// Wave vector of the partially transformed kernel. Transverse components
/// are real; the z component is fixed by the branch rule i k_z = q sign(z)
/// (d/dz of exp(-q|z|) gives -q sign(z), and d/dx_j -> -i k_j).
struct BranchWavevector {
  std::array<std::complex<double>, 3> k;

  static BranchWavevector at(double z, double kx, double ky) {
    if (z == 0.0) throw SingularityError("branch rule undefined at z = 0");
    const double q = std::hypot(kx, ky);
    const double sign = z > 0.0 ? 1.0 : -1.0;
    return {{std::complex<double>{kx}, std::complex<double>{ky},
             std::complex<double>{0.0, -sign * q}}};
  }
};

/// sum_j k_j(z, k_perp) k_j(z, -k_perp). The z component keeps its branch
/// under k_perp -> -k_perp while the transverse ones flip, so the sum is
/// -(k_perp^2 + q^2) = -2 q^2 rather than the naive zero.
inline std::complex<double> branch_contraction(double z, double kx, double ky) {
  const auto plus = BranchWavevector::at(z, kx, ky);
  const auto minus = BranchWavevector::at(z, -kx, -ky);
  std::complex<double> s = 0.0;
  for (std::size_t j = 0; j < 3; ++j) s += plus.k[j] * minus.k[j];
  return s;
}

/// G^_11(z, k_perp) = T^_1ij(z, k) T^_1ij(z, -k), T^_lij = -i k_l k_i k_j psi^.
inline double G11_hat(double z, double kx, double ky) {
  const double q = std::hypot(kx, ky);
  const double psi = coulomb_kernel_hat(z, q);
  const auto plus = BranchWavevector::at(z, kx, ky);
  const auto minus = BranchWavevector::at(z, -kx, -ky);
  const std::complex<double> contraction = branch_contraction(z, kx, ky);
  const std::complex<double> i{0.0, 1.0};
  const std::complex<double> v =
      (-i * plus.k[0]) * (-i * minus.k[0]) * contraction * contraction * psi * psi;
  return v.real();
}

/// G_perp(z) = integral G_11 dx dy = 15 pi / (2 z^6).
inline double G_perp(double z) {
  detail::require_positive(z, "z");
  const double z3 = z * z * z;
  return 15.0 * std::numbers::pi / (2.0 * z3 * z3);
}

/// G_perp from the k_perp integral (1/(2 pi)^2) integral G^_11 2 pi q dq,
/// with k_x^2 replaced by its angular mean q^2/2 (k_x = k_y = q/sqrt 2).
inline quad::IntegralResult G_perp_fourier(double z, const quad::QuadratureSpec& spec = {}) {
  detail::require_positive(z, "z");
  const double scale = G_perp(z);
  auto f = [&](double q) {
    if (q == 0.0) return 0.0;
    const double c = q / std::numbers::sqrt2;
    return G11_hat(z, c, c) * 2.0 * std::numbers::pi * q /
           (4.0 * std::numbers::pi * std::numbers::pi) / scale;
  };
  auto r = quad::integrate_semi_infinite(f, 3.0 / z, spec);
  r.value *= scale;
  r.error_estimate *= scale;
  return r;
}

/// G_perp from the real-space xy integral of G_11 = T_1ij T_1ij, in polar
/// form 2 pi integral rho (G_11 + G_22)/2 at (rho, 0, z) d rho.
inline quad::IntegralResult G_perp_real_space(double z, const quad::QuadratureSpec& spec = {}) {
  detail::require_positive(z, "z");
  const double scale = G_perp(z);
  auto f = [&](double rho) {
    const auto t = force_tensor(Vec3{rho, 0.0, z});
    const double mean = 0.5 * (contracted_force(t, 0, 0) + contracted_force(t, 1, 1));
    return 2.0 * std::numbers::pi * rho * mean / scale;
  };
  auto r = quad::integrate_semi_infinite(f, z, spec);
  r.value *= scale;
  r.error_estimate *= scale;
  return r;
}

/// G_h = rho1 integral_{z0}^inf G_perp(z) dz = 3 pi rho1 / (2 z0^5).
inline double G_halfplane(double rho1, double z0) {
  detail::require_positive(rho1, "rho1");
  detail::require_positive(z0, "z0");
  return 3.0 * std::numbers::pi * rho1 / (2.0 * std::pow(z0, 5));
}

inline quad::IntegralResult G_halfplane_quadrature(double rho1, double z0,
                                                   const quad::QuadratureSpec& spec = {}) {
  detail::require_positive(rho1, "rho1");
  detail::require_positive(z0, "z0");
  const double scale = rho1 * G_perp(z0) * z0;
  auto r = quad::integrate_semi_infinite(
      [&](double s) { return rho1 * G_perp(z0 + s) / scale; }, z0, spec);
  r.value *= scale;
  r.error_estimate *= scale;
  return r;
}

/// G = rho2 integral_d^inf G_h(rho1, z) dz = 3 pi rho1 rho2 / (8 d^4).
inline double G_two_planes(double rho1, double rho2, double d) {
  detail::require_positive(rho1, "rho1");
  detail::require_positive(rho2, "rho2");
  detail::require_positive(d, "d");
  return 3.0 * std::numbers::pi * rho1 * rho2 / (8.0 * std::pow(d, 4));
}

inline quad::IntegralResult G_two_planes_quadrature(double rho1, double rho2, double d,
                                                    const quad::QuadratureSpec& spec = {}) {
  detail::require_positive(rho2, "rho2");
  const double scale = rho2 * G_halfplane(rho1, d) * d;
  auto r = quad::integrate_semi_infinite(
      [&](double s) { return rho2 * G_halfplane(rho1, d + s) / scale; }, d, spec);
  r.value *= scale;
  r.error_estimate *= scale;
  return r;
}

/// u-space route: G = (pi rho1 rho2 / d^4) integral_0^inf u^3 exp(-2u) du.
inline quad::IntegralResult G_two_planes_u_space(double rho1, double rho2, double d,
                                                 const quad::QuadratureSpec& spec = {}) {
  detail::require_positive(rho1, "rho1");
  detail::require_positive(rho2, "rho2");
  detail::require_positive(d, "d");
  auto r = quad::integrate_semi_infinite([](double u) { return u * u * u * std::exp(-2.0 * u); },
                                         1.0, spec);
  const double pre = std::numbers::pi * rho1 * rho2 / std::pow(d, 4);
  r.value *= pre;
  r.error_estimate *= pre;
  return r;
}

}  // namespace casimir::geometry
