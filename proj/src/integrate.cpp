#include "nambu/integrate.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "nambu/clebsch.hpp"

namespace nambu {

namespace {

constexpr double kDriftFloor = 1e-300;

void require_positive_dt(double dt, const char* who) {
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw DomainError(fmt::format("{}: dt must be positive and finite, got {}", who, dt));
}

std::string g17(double x) { return fmt::format("{:.17g}", x); }

}  // namespace

Vec step_implicit_midpoint(const PoissonSystem& sys, const Observable& hamiltonian, const Vec& xi,
                           double dt, double tol, int max_iter) {
  require_positive_dt(dt, "step_implicit_midpoint");
  if (!(tol > 0.0)) throw DomainError("step_implicit_midpoint: tol must be positive");
  if (max_iter < 1) throw DomainError("step_implicit_midpoint: max_iter must be >= 1");

  auto field = [&](const Vec& m) -> Vec { return sys.J(m) * hamiltonian.gradient(m); };
  const double scale = std::max(1.0, xi.norm());
  Vec next = xi + dt * field(xi);
  double delta = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    const Vec updated = xi + dt * field(0.5 * (xi + next));
    delta = (updated - next).norm();
    next = updated;
    if (!next.allFinite()) break;
    if (delta <= tol * scale) return next;
  }
  throw ConvergenceError(
      fmt::format("implicit midpoint did not converge in {} iterations (last update {:.3e})",
                  max_iter, delta),
      delta, max_iter);
}

std::string to_string(Method m) { return m == Method::rk4 ? "rk4" : "midpoint"; }

Method parse_method(const std::string& s) {
  if (s == "rk4") return Method::rk4;
  if (s == "midpoint") return Method::midpoint;
  throw ConfigError(fmt::format("unknown integration method '{}' (expected rk4 or midpoint)", s));
}

HamiltonianSystem euler_top_system(const Vec3& inertia) {
  if (!(inertia.array() > 0.0).all())
    throw DomainError("euler_top_system: moments of inertia must be positive");
  return HamiltonianSystem{so3_system(), euler_kinetic_energy(inertia)};
}

const std::vector<double>& Trajectory::series(const std::string& name) const {
  for (std::size_t i = 0; i < invariant_names.size(); ++i)
    if (invariant_names[i] == name) return invariant_series[i];
  throw DomainError(fmt::format("trajectory has no invariant named '{}'", name));
}

void Trajectory::validate() const {
  if (states.size() != times.size())
    throw DomainError("trajectory: states and times differ in length");
  if (invariant_series.size() != invariant_names.size())
    throw DomainError("trajectory: invariant names and series differ in count");
  for (const auto& s : invariant_series)
    if (s.size() != times.size()) throw DomainError("trajectory: invariant series length mismatch");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw DomainError("trajectory: times not strictly increasing");
}

Trajectory simulate(const HamiltonianSystem& system, const Vec& x0, double dt, int nsteps,
                    Method method, double tol, int max_iter) {
  require_positive_dt(dt, "simulate");
  if (nsteps < 1) throw DomainError("simulate: nsteps must be >= 1");
  if (x0.size() != system.poisson.dim)
    throw DomainError(fmt::format("simulate: state has dimension {}, system expects {}", x0.size(),
                                  system.poisson.dim));

  std::vector<Observable> invariants{system.hamiltonian};
  for (const auto& c : system.poisson.casimirs) invariants.push_back(c);

  Trajectory traj;
  for (std::size_t i = 0; i < invariants.size(); ++i) {
    const auto& name = invariants[i].name();
    traj.invariant_names.push_back(name.empty() ? fmt::format("I{}", i) : name);
  }
  traj.invariant_series.resize(invariants.size());
  traj.times.reserve(nsteps + 1);
  traj.states.reserve(nsteps + 1);

  auto record = [&](double t, const Vec& x) {
    traj.times.push_back(t);
    traj.states.push_back(x);
    for (std::size_t i = 0; i < invariants.size(); ++i)
      traj.invariant_series[i].push_back(invariants[i](x));
  };

  const auto rhs = [&system](const Vec& x) -> Vec { return system.rhs(x); };
  Vec x = x0;
  record(0.0, x);
  for (int n = 1; n <= nsteps; ++n) {
    if (method == Method::rk4)
      x = step_rk4(rhs, x, dt);
    else
      x = step_implicit_midpoint(system.poisson, system.hamiltonian, x, dt, tol, max_iter);
    if (!x.allFinite())
      throw NumericalError(fmt::format("simulate: non-finite state at step {}", n));
    record(n * dt, x);
  }
  return traj;
}

double max_relative_drift(const std::vector<double>& series) {
  if (series.empty()) return 0.0;
  const double ref = std::max(std::abs(series.front()), kDriftFloor);
  double worst = 0.0;
  for (double s : series) worst = std::max(worst, std::abs(s - series.front()) / ref);
  return worst;
}

double relative_drift_slope(const std::vector<double>& series) {
  const std::size_t n = series.size();
  if (n < 2) return 0.0;
  const double ref = std::max(std::abs(series.front()), kDriftFloor);
  const double kbar = 0.5 * static_cast<double>(n - 1);
  double ybar = 0.0;
  for (double s : series) ybar += (s - series.front()) / ref;
  ybar /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double dk = static_cast<double>(k) - kbar;
    sxy += dk * ((series[k] - series.front()) / ref - ybar);
    sxx += dk * dk;
  }
  return sxy / sxx;
}

double flow_jacobian_determinant(const std::function<Vec(const Vec&)>& flow, const Vec& x,
                                 double h) {
  const Eigen::Index n = x.size();
  Mat jac(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    Vec xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    jac.col(j) = (flow(xp) - flow(xm)) / (2.0 * h);
  }
  return jac.determinant();
}

RealizationComparison compare_realizations_detail(const Vec3& xi0, const Vec3& inertia, double dt,
                                                  int nsteps, const LiftChoice& lift) {
  require_positive_dt(dt, "compare_realizations");
  if (nsteps < 1) throw DomainError("compare_realizations: nsteps must be >= 1");
  if (!(xi0.norm() > 0.0))
    throw DomainError("compare_realizations: xi0 = 0 has no Cayley-Klein lift with fixed gauge");
  const Observable h = euler_kinetic_energy(inertia);

  auto direct = [&](const Vec& xi) -> Vec { return euler_top_rhs(Vec3(xi), inertia); };
  auto on_sp6 = [&](const Vec& z) -> Vec {
    const auto s = CanonicalState::from_stacked(z);
    const Vec g = pullback_gradient_qp(h.gradient(angular_momentum_map(s)), s);
    Vec out(6);
    out << g.tail(3), -g.head(3);
    return out;
  };
  auto on_spin = [&](const Vec& z) -> Vec {
    const SpinState s{Eigen::Vector4d(z)};
    const Vec g = pullback_gradient_spin(h.gradient(cayley_klein_map(s)), s);
    Vec out(4);
    out << g.tail(2), -g.head(2);
    return out;
  };

  Vec a = xi0;
  Vec b = angular_momentum_lift(xi0, lift.sp6_scale, lift.sp6_frame_angle).stacked();
  Vec c = cayley_klein_lift(xi0, lift.spin_gauge).z;

  RealizationComparison out;
  auto compare = [&] {
    const Vec3 xa = a;
    const Vec3 xb = angular_momentum_map(CanonicalState::from_stacked(b));
    const Vec3 xc = cayley_klein_map(SpinState(Eigen::Vector4d(c)));
    out.direct_vs_sp6 = std::max(out.direct_vs_sp6, (xa - xb).norm());
    out.direct_vs_spin = std::max(out.direct_vs_spin, (xa - xc).norm());
    out.sp6_vs_spin = std::max(out.sp6_vs_spin, (xb - xc).norm());
  };
  compare();
  for (int n = 0; n < nsteps; ++n) {
    a = step_rk4(direct, a, dt);
    b = step_rk4(on_sp6, b, dt);
    c = step_rk4(on_spin, c, dt);
    compare();
  }
  out.discrepancy = std::max({out.direct_vs_sp6, out.direct_vs_spin, out.sp6_vs_spin});
  return out;
}

double compare_realizations(const Vec3& xi0, const Vec3& inertia, double dt, int nsteps) {
  return compare_realizations_detail(xi0, inertia, dt, nsteps).discrepancy;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                          const std::vector<std::string>& state_names) {
  traj.validate();
  out << "time";
  for (const auto& s : state_names) out << ',' << s;
  for (const auto& s : traj.invariant_names) out << ',' << s;
  out << '\n';
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    if (static_cast<std::size_t>(traj.states[k].size()) != state_names.size())
      throw DomainError("write_trajectory_csv: state width does not match column names");
    out << g17(traj.times[k]);
    for (Eigen::Index j = 0; j < traj.states[k].size(); ++j) out << ',' << g17(traj.states[k][j]);
    for (const auto& s : traj.invariant_series) out << ',' << g17(s[k]);
    out << '\n';
  }
}

std::string trajectory_json(const Trajectory& traj, const std::vector<std::string>& state_names,
                            const RunMetadata& meta) {
  traj.validate();
  nlohmann::ordered_json j;
  j["experiment"] = meta.experiment;
  j["method"] = meta.method;
  j["dt"] = meta.dt;
  j["seed"] = meta.seed;
  j["time"] = traj.times;
  for (std::size_t c = 0; c < state_names.size(); ++c) {
    std::vector<double> col;
    col.reserve(traj.states.size());
    for (const auto& s : traj.states) col.push_back(s[static_cast<Eigen::Index>(c)]);
    j["states"][state_names[c]] = col;
  }
  for (std::size_t i = 0; i < traj.invariant_names.size(); ++i)
    j["invariants"][traj.invariant_names[i]] = traj.invariant_series[i];
  return j.dump(2) + "\n";
}

}  // namespace nambu
