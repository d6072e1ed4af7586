#include "nambu/clebsch.hpp"

#include <cmath>
#include <complex>

#include <fmt/format.h>

#include "nambu/error.hpp"

namespace nambu {

namespace {

void require_three(const CanonicalState& s, const char* who) {
  if (s.q.size() != 3 || s.p.size() != 3)
    throw DomainError(fmt::format("{}: expected n = 3, got n = {}", who, s.q.size()));
}

Vec3 head3(const Vec& v) { return Vec3(v[0], v[1], v[2]); }

}  // namespace

CanonicalState::CanonicalState(Vec q_, Vec p_) : q(std::move(q_)), p(std::move(p_)) {
  if (q.size() != p.size())
    throw DomainError(fmt::format("CanonicalState: |q| = {} but |p| = {}", q.size(), p.size()));
  if (!q.allFinite() || !p.allFinite()) throw DomainError("CanonicalState: non-finite entry");
}

Vec CanonicalState::stacked() const {
  Vec z(2 * q.size());
  z << q, p;
  return z;
}

CanonicalState CanonicalState::from_stacked(const Vec& z) {
  if (z.size() % 2 != 0) throw DomainError("CanonicalState: odd-length phase vector");
  const Eigen::Index n = z.size() / 2;
  return CanonicalState(z.head(n), z.tail(n));
}

double canonical_bracket(const Vec& grad_g, const Vec& grad_h) {
  if (grad_g.size() != grad_h.size())
    throw DomainError("canonical_bracket: gradient lengths differ");
  if (grad_g.size() % 2 != 0)
    throw DomainError(fmt::format("canonical_bracket: odd length {}", grad_g.size()));
  const Eigen::Index n = grad_g.size() / 2;
  return grad_g.head(n).dot(grad_h.tail(n)) - grad_g.tail(n).dot(grad_h.head(n));
}

Vec3 angular_momentum_map(const CanonicalState& s) {
  require_three(s, "angular_momentum_map");
  return head3(s.q).cross(head3(s.p));
}

Vec pullback_gradient_qp(const Vec3& grad_xi, const CanonicalState& s) {
  require_three(s, "pullback_gradient_qp");
  Vec out(6);
  out << head3(s.p).cross(grad_xi), -head3(s.q).cross(grad_xi);
  return out;
}

Observable pullback_qp(const Observable& f) {
  return Observable(
      [f](const Vec& z) { return f(angular_momentum_map(CanonicalState::from_stacked(z))); },
      [f](const Vec& z) {
        const auto s = CanonicalState::from_stacked(z);
        return pullback_gradient_qp(f.gradient(angular_momentum_map(s)), s);
      },
      f.name());
}

double reduction_residual_sp6(const Observable& g, const Observable& h, const CanonicalState& s) {
  const Vec3 xi = angular_momentum_map(s);
  const double lifted = canonical_bracket(pullback_gradient_qp(g.gradient(xi), s),
                                          pullback_gradient_qp(h.gradient(xi), s));
  const double reduced = poisson_bracket(so3_system(), g, h, xi);
  return std::abs(lifted - reduced);
}

Vec3 cayley_klein_map(const SpinState& s) {
  const double q1 = s.z[0], q2 = s.z[1], p1 = s.z[2], p2 = s.z[3];
  return Vec3(0.5 * (q1 * q2 + p1 * p2), 0.5 * (q1 * p2 - q2 * p1),
              0.25 * (q1 * q1 + p1 * p1 - q2 * q2 - p2 * p2));
}

Eigen::Matrix<double, 3, 4> cayley_klein_jacobian(const SpinState& s) {
  const double q1 = s.z[0], q2 = s.z[1], p1 = s.z[2], p2 = s.z[3];
  Eigen::Matrix<double, 3, 4> d;
  d << q2, q1, p2, p1,
       p2, -p1, -q2, q1,
       q1, -q2, p1, -p2;
  return 0.5 * d;
}

Vec pullback_gradient_spin(const Vec3& grad_xi, const SpinState& s) {
  return cayley_klein_jacobian(s).transpose() * grad_xi;
}

Observable pullback_spin(const Observable& f) {
  return Observable(
      [f](const Vec& z) { return f(cayley_klein_map(SpinState(Eigen::Vector4d(z)))); },
      [f](const Vec& z) {
        const SpinState s{Eigen::Vector4d(z)};
        return pullback_gradient_spin(f.gradient(cayley_klein_map(s)), s);
      },
      f.name());
}

double su2_casimir(const SpinState& s) { return 0.5 * s.z.squaredNorm(); }

double gauge_angle_su2(const SpinState& s) {
  const double q1 = s.z[0], q2 = s.z[1], p1 = s.z[2], p2 = s.z[3];
  if ((q1 == 0.0 && p1 == 0.0) || (q2 == 0.0 && p2 == 0.0))
    throw DomainError("gauge_angle_su2: a spinor component vanishes, its phase is undefined");
  return -0.5 * (std::atan2(p1, q1) + std::atan2(p2, q2));
}

double spin_reduction_residual(const Observable& g, const Observable& h, const SpinState& s) {
  const Vec3 xi = cayley_klein_map(s);
  const double lifted = canonical_bracket(pullback_gradient_spin(g.gradient(xi), s),
                                          pullback_gradient_spin(h.gradient(xi), s));
  const double reduced = poisson_bracket(so3_system(), g, h, xi);
  return std::abs(lifted - reduced);
}

So3Chart so3_local_poisson(const Vec3& xi) {
  const double r2 = xi[1] * xi[1] + xi[2] * xi[2];
  if (!(r2 > 0.0))
    throw DomainError("so3_local_poisson: chart is singular on the xi1 axis (xi2 = xi3 = 0)");
  So3Chart chart;
  chart.poisson << 0, 0, 0,
                   0, 0, 1,
                   0, -1, 0;
  chart.coordinates = Vec3(0.5 * xi.squaredNorm(), std::atan2(-xi[1], xi[2]), xi[0]);
  chart.jacobian.row(0) = xi.transpose();
  chart.jacobian.row(1) = Vec3(0.0, -xi[2] / r2, xi[1] / r2).transpose();
  chart.jacobian.row(2) = Vec3(1.0, 0.0, 0.0).transpose();
  return chart;
}

double gauge_angle_so3(const CanonicalState& s) {
  const Vec3 xi = angular_momentum_map(s);
  const double norm = xi.norm();
  if (!(norm > 0.0)) throw DomainError("gauge_angle_so3: q x p = 0, no gauge orbit");
  const Vec3 q = head3(s.q);
  int j = 0;
  q.cwiseAbs().maxCoeff(&j);
  const Vec3 rotated = (xi / norm).cross(q);
  return std::atan2(-rotated[j], q[j]) / norm;
}

CanonicalState angular_momentum_lift(const Vec3& xi, double scale, double frame_angle) {
  if (!xi.allFinite()) throw DomainError("angular_momentum_lift: non-finite xi");
  if (!(scale > 0.0)) throw DomainError("angular_momentum_lift: scale must be positive");
  const double norm = xi.norm();
  if (norm == 0.0) return CanonicalState(Vec3(scale, 0.0, 0.0), Vec3::Zero());
  const Vec3 axis = xi / norm;
  int k = 0;
  axis.cwiseAbs().minCoeff(&k);
  Vec3 e = Vec3::Zero();
  e[k] = 1.0;
  const Vec3 u0 = (e - e.dot(axis) * axis).normalized();
  const Vec3 w0 = axis.cross(u0);
  const Vec3 u = std::cos(frame_angle) * u0 + std::sin(frame_angle) * w0;
  const Vec3 w = axis.cross(u);
  return CanonicalState(scale * u, (norm / scale) * w);
}

SpinState cayley_klein_lift(const Vec3& xi, double gauge) {
  using cplx = std::complex<double>;
  if (!xi.allFinite()) throw DomainError("cayley_klein_lift: non-finite xi");
  const double norm = xi.norm();
  // z1* z2 = 2 (xi1 + i xi2), |z1|^2 = 2(|xi| + xi3), |z2|^2 = 2(|xi| - xi3)
  cplx z1, z2;
  if (xi[2] >= 0.0) {
    z1 = std::sqrt(2.0 * (norm + xi[2]));
    z2 = z1 == 0.0 ? cplx(0.0) : 2.0 * cplx(xi[0], xi[1]) / z1;
  } else {
    z2 = std::sqrt(2.0 * (norm - xi[2]));
    z1 = 2.0 * cplx(xi[0], -xi[1]) / z2;
  }
  const cplx phase = std::polar(1.0, gauge);
  z1 *= phase;
  z2 *= phase;
  return SpinState(z1.real(), z2.real(), z1.imag(), z2.imag());
}

}  // namespace nambu
