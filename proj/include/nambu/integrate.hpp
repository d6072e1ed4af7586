#pragma once

// Time stepping for finite-dimensional Poisson systems, conservation
// diagnostics and the three-realization Euler top comparison.

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "nambu/algebra3.hpp"
#include "nambu/error.hpp"

namespace nambu {

/// Classical fourth-order Runge-Kutta step. `State` needs `+`, `-` and
/// multiplication by a double; this covers Eigen vectors and the field states.
template <class State, class Rhs>
State step_rk4(const Rhs& rhs, const State& x, double dt) {
  if (!(dt > 0.0)) throw DomainError("step_rk4: dt must be positive");
  const State k1 = rhs(x);
  const State k2 = rhs(State(x + (0.5 * dt) * k1));
  const State k3 = rhs(State(x + (0.5 * dt) * k2));
  const State k4 = rhs(State(x + dt * k3));
  return State(x + (dt / 6.0) * State(k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

/// xi+ = xi + dt J(m) dH(m), m = (xi + xi+)/2, solved by fixed-point iteration
/// until successive iterates differ by at most tol * max(1, |xi|).
Vec step_implicit_midpoint(const PoissonSystem& sys, const Observable& hamiltonian, const Vec& xi,
                           double dt, double tol = 1e-13, int max_iter = 50);

enum class Method { rk4, midpoint };

std::string to_string(Method m);
Method parse_method(const std::string& s);

/// Hamiltonian H on a Poisson manifold; invariants recorded are H and every
/// registered Casimir.
struct HamiltonianSystem {
  PoissonSystem poisson;
  Observable hamiltonian;

  Vec rhs(const Vec& xi) const { return poisson.J(xi) * hamiltonian.gradient(xi); }
};

/// Euler top on so(3)*: H1 = kinetic energy, Casimir H2 = |xi|^2 / 2.
HamiltonianSystem euler_top_system(const Vec3& inertia);

struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> states;
  std::vector<std::string> invariant_names;
  std::vector<std::vector<double>> invariant_series;

  const std::vector<double>& series(const std::string& name) const;
  /// Throws DomainError when lengths disagree or times are not increasing.
  void validate() const;
};

Trajectory simulate(const HamiltonianSystem& system, const Vec& x0, double dt, int nsteps,
                    Method method, double tol = 1e-13, int max_iter = 50);

/// max_k |s_k - s_0| / max(|s_0|, 1e-300)
double max_relative_drift(const std::vector<double>& series);

/// Least-squares slope of (s_k - s_0) / max(|s_0|, 1e-300) against k.
double relative_drift_slope(const std::vector<double>& series);

/// det of the central-difference Jacobian of `flow` at x.
double flow_jacobian_determinant(const std::function<Vec(const Vec&)>& flow, const Vec& x,
                                 double h = 1e-6);

struct RealizationComparison {
  double discrepancy = 0.0;   ///< max over time and over the three pairs
  double direct_vs_sp6 = 0.0;
  double direct_vs_spin = 0.0;
  double sp6_vs_spin = 0.0;
};

struct LiftChoice {
  double sp6_scale = 1.0;
  double sp6_frame_angle = 0.0;
  double spin_gauge = 0.0;
};

/// RK4 on so(3)* directly, on R^6 with H(q x p), and on R^4 with H(xi(Z)).
RealizationComparison compare_realizations_detail(const Vec3& xi0, const Vec3& inertia, double dt,
                                                  int nsteps, const LiftChoice& lift = {});
double compare_realizations(const Vec3& xi0, const Vec3& inertia, double dt, int nsteps);

/// Header: time, state_names..., invariant names. 17 significant digits.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                          const std::vector<std::string>& state_names);

struct RunMetadata {
  std::string experiment;
  std::string method;
  double dt = 0.0;
  std::uint64_t seed = 0;
};

/// JSON mirror of the CSV with run metadata.
std::string trajectory_json(const Trajectory& traj, const std::vector<std::string>& state_names,
                            const RunMetadata& meta);

}  // namespace nambu
