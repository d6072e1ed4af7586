#pragma once

// Canonicalization of the so(3) Lie-Poisson system: angular-momentum
// reduction from R^6 and spin (Cayley-Klein) reduction from R^4, with the
// gauge angles conjugate to the Casimir.

#include "nambu/algebra3.hpp"

namespace nambu {

/// Canonical coordinates (q, p) of R^{2n}.
struct CanonicalState {
  Vec q;
  Vec p;

  CanonicalState() = default;
  CanonicalState(Vec q_, Vec p_);

  int n() const noexcept { return static_cast<int>(q.size()); }
  /// (q, p) stacked.
  Vec stacked() const;
  static CanonicalState from_stacked(const Vec& z);
};

/// Z = (q1, q2, p1, p2), the real form of z_k = q_k + i p_k.
struct SpinState {
  Eigen::Vector4d z = Eigen::Vector4d::Zero();

  SpinState() = default;
  explicit SpinState(const Eigen::Vector4d& z_) : z(z_) {}
  SpinState(double q1, double q2, double p1, double p2) : z(q1, q2, p1, p2) {}
};

/// sum_j (dG/dq_j dH/dp_j - dG/dp_j dH/dq_j)
double canonical_bracket(const Vec& grad_g, const Vec& grad_h);

/// xi = q x p
Vec3 angular_momentum_map(const CanonicalState& s);

/// (p x dF/dxi, -q x dF/dxi): the (q, p) gradient of F(q x p).
Vec pullback_gradient_qp(const Vec3& grad_xi, const CanonicalState& s);

/// F(q x p) as an observable on R^6 with the chain-rule gradient.
Observable pullback_qp(const Observable& f);

/// |{G(xi(z)), H(xi(z))}_sp6 - {G, H}_so3(xi(z))|
double reduction_residual_sp6(const Observable& g, const Observable& h, const CanonicalState& s);

Vec3 cayley_klein_map(const SpinState& s);
/// d xi / d Z (3 x 4).
Eigen::Matrix<double, 3, 4> cayley_klein_jacobian(const SpinState& s);
Vec pullback_gradient_spin(const Vec3& grad_xi, const SpinState& s);
Observable pullback_spin(const Observable& f);

/// C = (q1^2 + p1^2 + q2^2 + p2^2) / 2 = 2 |xi(Z)|
double su2_casimir(const SpinState& s);

/// Angle conjugate to su2_casimir: {theta, C}_4 = 1.
/// theta = -(Arg z1 + Arg z2) / 2 with principal-branch Arg.
double gauge_angle_su2(const SpinState& s);

/// |{G(xi(Z)), H(xi(Z))}_4 - {G, H}_so3(xi(Z))|
double spin_reduction_residual(const Observable& g, const Observable& h, const SpinState& s);

/// Local chart (C, phi, xi1) of so(3)* around a point off the xi1 axis.
struct So3Chart {
  Mat3 poisson;      ///< constant J' in chart coordinates
  Vec3 coordinates;  ///< (C, phi, xi1)
  Mat3 jacobian;     ///< d(C, phi, xi1) / d xi
};

/// C = |xi|^2 / 2, phi = atan2(-xi2, xi3), xi1. Requires xi2^2 + xi3^2 > 0.
So3Chart so3_local_poisson(const Vec3& xi);

/// Angle conjugate to C = |q x p|^2 / 2 on R^6 in the chart j = argmax |q_j|:
/// theta = atan2(-(xi_hat x q)_j, q_j) / |xi|.
double gauge_angle_so3(const CanonicalState& s);

/// (q, p) with q x p = xi, |q| = scale, rotated by frame_angle about xi.
CanonicalState angular_momentum_lift(const Vec3& xi, double scale = 1.0, double frame_angle = 0.0);

/// Z with cayley_klein_map(Z) = xi; the gauge phase multiplies (z1, z2) by exp(i gauge).
SpinState cayley_klein_lift(const Vec3& xi, double gauge = 0.0);

}  // namespace nambu
