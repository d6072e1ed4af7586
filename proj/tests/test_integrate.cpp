#include <doctest.h>

#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "generators.hpp"
#include "nambu/error.hpp"
#include "nambu/integrate.hpp"

using namespace nambu;

namespace {

// Fine rk4 substeps as an independent reference for one Euler-top step.
Vec3 reference_step(const Vec3& xi, const Vec3& inertia, double dt, int sub = 2000) {
  Vec x = xi;
  const double h = dt / sub;
  for (int i = 0; i < sub; ++i) {
    const auto f = [&](const Vec& y) -> Vec { return euler_top_rhs(Vec3(y), inertia); };
    const Vec k1 = f(x), k2 = f(x + 0.5 * h * k1), k3 = f(x + 0.5 * h * k2), k4 = f(x + h * k3);
    x += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return Vec3(x);
}

const Vec3 kInertia(1, 2, 3);
const Vec3 kXi0(1, 0.1, 0.1);

}  // namespace

TEST_CASE("step_rk4 scalar cases") {
  Vec x(1);
  x[0] = 1.0;
  CHECK(step_rk4([](const Vec& y) -> Vec { return Vec::Zero(y.size()); }, x, 0.1)[0] == 1.0);
  CHECK(std::abs(step_rk4([](const Vec& y) -> Vec { return y; }, x, 0.1)[0] - std::exp(0.1)) <= 1e-7);
  CHECK_THROWS_AS(step_rk4([](const Vec& y) -> Vec { return y; }, x, 0.0), DomainError);
  CHECK_THROWS_AS(step_rk4([](const Vec& y) -> Vec { return y; }, x, -1.0), DomainError);
}

TEST_CASE("step_rk4 matches a fine reference on the euler top") {
  const HamiltonianSystem sys = euler_top_system(kInertia);
  gen::Gen g(41);
  for (int k = 0; k < 10; ++k) {
    const Vec3 xi = g.vec3();
    const Vec one = step_rk4([&](const Vec& y) { return sys.rhs(y); }, Vec(xi), 1e-2);
    CHECK((one - reference_step(xi, kInertia, 1e-2)).norm() <= 1e-8);
  }
}

TEST_CASE("implicit midpoint") {
  const HamiltonianSystem sys = euler_top_system(kInertia);
  const Observable zero([](const Vec&) { return 0.0; }, [](const Vec& x) { return Vec(Vec::Zero(x.size())); });
  const Vec xi = kXi0;
  CHECK((step_implicit_midpoint(sys.poisson, zero, xi, 0.1) - xi).norm() == 0.0);
  CHECK_THROWS_AS(step_implicit_midpoint(sys.poisson, sys.hamiltonian, xi, 0.0), DomainError);
  CHECK_THROWS_AS(step_implicit_midpoint(sys.poisson, sys.hamiltonian, xi, 0.5, 1e-13, 1), ConvergenceError);

  gen::Gen g(42);
  for (int k = 0; k < 50; ++k) {
    const Vec x = g.vec(3);
    const Vec y = step_implicit_midpoint(sys.poisson, sys.hamiltonian, x, 1e-2);
    CHECK(std::abs(0.5 * y.squaredNorm() - 0.5 * x.squaredNorm()) <= 1e-12 * std::max(1.0, x.squaredNorm()));
  }

  // One-step difference against rk4 is O(dt^3).
  double prev = 0.0;
  for (double dt : {0.04, 0.02, 0.01}) {
    const Vec mp = step_implicit_midpoint(sys.poisson, sys.hamiltonian, xi, dt);
    const Vec rk = step_rk4([&](const Vec& y) { return sys.rhs(y); }, xi, dt);
    const double d = (mp - rk).norm();
    if (prev > 0.0) CHECK(std::log2(prev / d) == doctest::Approx(3.0).epsilon(0.1));
    prev = d;
  }
}

TEST_CASE("simulate") {
  const HamiltonianSystem sys = euler_top_system(kInertia);
  const Trajectory t = simulate(sys, kXi0, 0.01, 10, Method::midpoint);
  CHECK(t.times.size() == 11);
  CHECK(t.states.size() == 11);
  CHECK(t.invariant_names == std::vector<std::string>{"H1", "H2"});
  CHECK(t.times.back() == doctest::Approx(0.1));
  CHECK_THROWS_AS(t.series("H3"), DomainError);

  const HamiltonianSystem frozen{so3_system(), Observable([](const Vec&) { return 0.0; }, [](const Vec& x) { return Vec(Vec::Zero(x.size())); })};
  for (Method m : {Method::rk4, Method::midpoint}) {
    const Trajectory c = simulate(frozen, kXi0, 0.1, 20, m);
    for (const auto& s : c.states) CHECK((s - Vec(kXi0)).norm() == 0.0);
  }

  // rk4 and midpoint trajectories converge to each other at the midpoint order.
  double prev = 0.0;
  for (double dt : {0.04, 0.02, 0.01}) {
    const int n = static_cast<int>(std::lround(0.4 / dt));
    const Trajectory a = simulate(sys, kXi0, dt, n, Method::rk4);
    const Trajectory b = simulate(sys, kXi0, dt, n, Method::midpoint);
    const double d = (a.states.back() - b.states.back()).norm();
    if (prev > 0.0) CHECK(std::log2(prev / d) == doctest::Approx(2.0).epsilon(0.1));
    prev = d;
  }
}

TEST_CASE("trajectory validation") {
  Trajectory t;
  t.times = {0.0, 1.0};
  t.states = {Vec::Zero(3), Vec::Zero(3)};
  t.invariant_names = {"H1"};
  t.invariant_series = {{1.0, 1.0}};
  CHECK_NOTHROW(t.validate());
  t.times = {1.0, 0.0};
  CHECK_THROWS_AS(t.validate(), DomainError);
  t.times = {0.0};
  CHECK_THROWS_AS(t.validate(), DomainError);
}

TEST_CASE("drift measures") {
  CHECK(max_relative_drift({2.0, 2.0, 2.0}) == 0.0);
  CHECK(max_relative_drift({2.0, 2.2, 1.5}) == doctest::Approx(0.25));
  std::vector<double> lin;
  for (int k = 0; k < 100; ++k) lin.push_back(4.0 + 0.004 * k);
  CHECK(relative_drift_slope(lin) == doctest::Approx(0.001));
  std::vector<double> osc;
  for (int k = 0; k < 1000; ++k) osc.push_back(1.0 + 1e-3 * std::sin(0.3 * k));
  CHECK(std::abs(relative_drift_slope(osc)) <= 1e-6);
}

TEST_CASE("euler top conservation under midpoint") {
  const Trajectory t = simulate(euler_top_system(kInertia), kXi0, 1e-2, 10000, Method::midpoint);
  CHECK(max_relative_drift(t.series("H2")) <= 1e-10);
  CHECK(max_relative_drift(t.series("H1")) <= 1e-8);
  CHECK(std::abs(relative_drift_slope(t.series("H1"))) <= 1e-12);
}

TEST_CASE("liouville: the discrete flow preserves volume") {
  const HamiltonianSystem sys = euler_top_system(kInertia);
  gen::Gen g(43);
  for (int k = 0; k < 10; ++k) {
    const Vec x = g.vec(3);
    // the midpoint defect in det is O(dt^3) for this nonlinear field
    const auto mid = [&](const Vec& y) { return step_implicit_midpoint(sys.poisson, sys.hamiltonian, y, 0.01); };
    const auto rk = [&](const Vec& y) { return step_rk4([&](const Vec& w) { return sys.rhs(w); }, y, 0.05); };
    CHECK(std::abs(flow_jacobian_determinant(mid, x) - 1.0) <= 1e-6);
    CHECK(std::abs(flow_jacobian_determinant(rk, x) - 1.0) <= 1e-6);
  }
  CHECK(flow_jacobian_determinant([](const Vec& y) -> Vec { return 2.0 * y; }, Vec::Ones(3)) == doctest::Approx(8.0));
}

TEST_CASE("three realizations agree") {
  CHECK(compare_realizations(Vec3(0, 1.3, 0), kInertia, 1e-2, 100) <= 1e-12);
  CHECK(compare_realizations(kXi0, Vec3(1, 1, 1), 1e-2, 100) <= 1e-12);
  CHECK(compare_realizations(kXi0, kInertia, 1e-3, 1000) <= 1e-8);

  // Two different R^6 lifts of the same xi give the same reduced trajectory.
  const RealizationComparison a = compare_realizations_detail(kXi0, kInertia, 1e-2, 200, LiftChoice{1.0, 0.0, 0.0});
  const RealizationComparison b = compare_realizations_detail(kXi0, kInertia, 1e-2, 200, LiftChoice{1.7, 0.9, 0.4});
  CHECK(a.direct_vs_sp6 <= 1e-8);
  CHECK(b.direct_vs_sp6 <= 1e-8);
  CHECK(b.direct_vs_spin <= 1e-8);
  CHECK(b.discrepancy == doctest::Approx(std::max({b.direct_vs_sp6, b.direct_vs_spin, b.sp6_vs_spin})));
}

TEST_CASE("realization discrepancy converges at fourth order") {
  std::vector<double> dts{0.1, 0.05, 0.025, 0.0125}, errs;
  for (double dt : dts) errs.push_back(compare_realizations(kXi0, kInertia, dt, static_cast<int>(std::lround(2.0 / dt))));
  // least-squares slope of log err against log dt
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < dts.size(); ++i) {
    const double x = std::log(dts[i]), y = std::log(errs[i]);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  const double n = double(dts.size());
  const double order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(order == doctest::Approx(4.0).epsilon(0.5 / 4.0));
}

TEST_CASE("methods parse") {
  CHECK(parse_method("rk4") == Method::rk4);
  CHECK(parse_method("midpoint") == Method::midpoint);
  CHECK(to_string(Method::midpoint) == "midpoint");
  CHECK_THROWS_AS(parse_method("euler"), ConfigError);
}

TEST_CASE("trajectory output") {
  const Trajectory t = simulate(euler_top_system(kInertia), kXi0, 0.1, 3, Method::rk4);
  std::ostringstream csv;
  write_trajectory_csv(csv, t, {"xi1", "xi2", "xi3"});
  std::istringstream in(csv.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "time,xi1,xi2,xi3,H1,H2");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 4);
  CHECK(csv.str().find("0.10000000000000001") != std::string::npos);

  const auto j = nlohmann::json::parse(trajectory_json(t, {"xi1", "xi2", "xi3"}, {"euler-top", "rk4", 0.1, 5}));
  CHECK(j["method"] == "rk4");
  CHECK(j["seed"] == 5);
  CHECK(j["states"]["xi2"].size() == 4);
  CHECK(j["invariants"]["H1"][3].get<double>() == t.series("H1")[3]);
}
