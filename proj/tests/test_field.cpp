#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "generators.hpp"
#include "nambu/error.hpp"
#include "nambu/field.hpp"
#include "nambu/integrate.hpp"
#include "spectral_oracle.hpp"

using namespace nambu;
using std::cos;
using std::sin;

namespace {

const double kPi = std::numbers::pi;

VectorField3 beltrami(const GridPtr& g) {
  return VectorField3::sample(g, [](double x, double, double) { return std::array<double, 3>{0, sin(x), cos(x)}; });
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("inv_curl examples") {
  const GridPtr g = Grid3::make(16);
  const auto w = VectorField3::sample(g, [](double x, double, double) { return std::array<double, 3>{0, 0, cos(x)}; });
  const auto v = VectorField3::sample(g, [](double x, double, double) { return std::array<double, 3>{0, sin(x), 0}; });
  CHECK((inv_curl(w) - v).max_abs() <= 1e-14);
  CHECK((inv_curl(beltrami(g)) - beltrami(g)).max_abs() <= 1e-14);
  CHECK(inv_curl(VectorField3(g)).max_abs() == 0.0);
}

TEST_CASE("inv_curl rejects fields that are not vorticities") {
  const GridPtr g = Grid3::make(16);
  const auto compressive = VectorField3::sample(g, [](double x, double, double) { return std::array<double, 3>{sin(x), 0, 0}; });
  CHECK_THROWS_AS(inv_curl(compressive), DomainError);
  CHECK_THROWS_AS(inv_curl(VectorField3(g, 1.0)), DomainError);
}

TEST_CASE("curl and inv_curl are inverse on solenoidal fields") {
  const GridPtr g = Grid3::make(16);
  gen::Gen r(61);
  for (int k = 0; k < 5; ++k) {
    const VectorField3 w = r.solenoidal(g, 4);
    CHECK((curl(inv_curl(w)) - w).max_abs() <= 1e-12 * std::max(1.0, w.max_abs()));
    CHECK((inv_curl(curl(w)) - w).max_abs() <= 1e-12 * std::max(1.0, w.max_abs()));
  }
}

TEST_CASE("inv_curl is self-adjoint") {
  const GridPtr g = Grid3::make(16);
  gen::Gen r(62);
  for (int k = 0; k < 10; ++k) {
    const VectorField3 a = r.solenoidal(g, 4), b = r.solenoidal(g, 4);
    const double lhs = inner(inv_curl(a), b), rhs = inner(a, inv_curl(b));
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("vortex_rhs") {
  const GridPtr g = Grid3::make(16);
  CHECK(vortex_rhs(beltrami(g)).max_abs() <= 1e-12);
  CHECK(vortex_rhs(VectorField3(g)).max_abs() == 0.0);
}

TEST_CASE("vortex_rhs matches the convolution oracle at N=8") {
  using namespace oracle;
  const GridPtr g = Grid3::make(8);
  // omega = a cos(k1.x) + b sin(k2.x), a . k1 = b . k2 = 0
  const Wave k1{1, 2, 0}, k2{0, -1, 2};
  const double a[3] = {2.0, -1.0, 0.7}, b[3] = {0.3, 0.4, 0.2};
  VSeries w;
  for (int d = 0; d < 3; ++d) w.c[d] = add(cos_mode(k1, a[d]), sin_mode(k2, b[d]));
  VSeries v;  // i k x w / |k|^2
  for (int d = 0; d < 3; ++d) {
    const int e = (d + 1) % 3, f = (d + 2) % 3;
    for (const auto& [k, c] : w.c[f]) v.c[d][k] += cd(0, k[e]) * c / double(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
    for (const auto& [k, c] : w.c[e]) v.c[d][k] -= cd(0, k[f]) * c / double(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
  }
  VSeries prod = cross(v, w);
  for (auto& c : prod.c) c = mask(c, 8);
  const VectorField3 want = evaluate(g, curl(prod));
  const VectorField3 omega = evaluate(g, w);
  CHECK((curl(inv_curl(omega)) - omega).max_abs() <= 1e-13);
  CHECK((vortex_rhs(omega) - want).max_abs() <= 1e-12);
}

TEST_CASE("helicity and energy") {
  const GridPtr g = Grid3::make(16);
  CHECK(std::abs(helicity(beltrami(g)) - 4 * kPi * kPi * kPi) <= 1e-10);
  CHECK(std::abs(kinetic_energy(beltrami(g)) - 4 * kPi * kPi * kPi) <= 1e-10);
  const auto mirror = VectorField3::sample(g, [](double x, double, double) { return std::array<double, 3>{0, 0, cos(x)}; });
  CHECK(std::abs(helicity(mirror)) <= 1e-12);
  CHECK(helicity(VectorField3(g)) == 0.0);
  CHECK(kinetic_energy(VectorField3(g)) == 0.0);
  gen::Gen r(63);
  const VectorField3 w = r.solenoidal(g, 3);
  CHECK(rel(helicity(2.0 * w), 4.0 * helicity(w)) <= 1e-12);
  CHECK(rel(kinetic_energy(2.0 * w), 4.0 * kinetic_energy(w)) <= 1e-12);
  CHECK(cfl_number(beltrami(g), 0.1) == doctest::Approx(0.1 / g->dx()));
}

TEST_CASE("random initial data") {
  const GridPtr g = Grid3::make(16);
  const VectorField3 v = random_solenoidal(g, 3, 0.5, 9);
  CHECK(divergence(v).max_abs() <= 1e-13);
  for (double m : v.mean()) CHECK(std::abs(m) <= 1e-15);
  CHECK(v.max_abs() == doctest::Approx(0.5));
  CHECK((random_solenoidal(g, 3, 0.5, 9) - v).max_abs() == 0.0);
  CHECK((random_solenoidal(g, 3, 0.5, 10) - v).max_abs() > 1e-3);
  CHECK((dealias(v) - v).max_abs() <= 1e-14);
  const ScalarField s = random_scalar(g, 2, 4);
  CHECK(std::abs(s.mean()) <= 1e-15);
  CHECK(s.max_abs() == doctest::Approx(1.0));
}

TEST_CASE("vortex flow conserves helicity and energy") {
  const GridPtr g = Grid3::make(16);
  gen::Gen r(64);
  for (std::uint64_t seed : {1u, 2u}) {
    VectorField3 w = curl(random_solenoidal(g, 3, 1.0, seed));
    const double dt = 0.05 * g->dx() / inv_curl(w).max_abs();
    CHECK(cfl_number(w, dt) <= 0.2);
    const double h0 = helicity(w), e0 = kinetic_energy(w);
    double dh = 0.0, de = 0.0;
    for (int n = 0; n < 100; ++n) {
      w = step_rk4([](const VectorField3& x) { return vortex_rhs(x); }, w, dt);
      dh = std::max(dh, rel(helicity(w), h0));
      de = std::max(de, rel(kinetic_energy(w), e0));
    }
    CHECK(dh <= 1e-6);
    CHECK(de <= 1e-6);
  }
}

TEST_CASE("barotropic closures") {
  const Barotropic iso = isothermal(2.0), gp = gross_pitaevskii(0.5);
  CHECK(iso.enthalpy(std::exp(1.0)) == doctest::Approx(4.0));
  CHECK(gp.enthalpy(3.0) == doctest::Approx(1.5));
  // d(rho eps)/d rho = h by central difference
  for (const Barotropic* b : {&iso, &gp})
    for (double r : {0.5, 1.0, 2.0}) {
      const double h = 1e-5;
      const double d = ((r + h) * b->internal_energy(r + h) - (r - h) * b->internal_energy(r - h)) / (2 * h);
      CHECK(d == doctest::Approx(b->enthalpy(r)).epsilon(1e-8));
    }
}

TEST_CASE("fluid_rhs examples") {
  const GridPtr g = Grid3::make(16);
  const Barotropic eos = isothermal(1.0);
  const FluidState rest{ScalarField(g, 1.3), VectorField3(g)};
  const FluidState d = fluid_rhs(rest, eos);
  CHECK(d.rho.max_abs() <= 1e-15);
  CHECK(d.v.max_abs() <= 1e-15);

  const double eps = 0.1, c1 = 0.7;
  const FluidState drift{ScalarField::sample(g, [&](double x, double, double) { return 1 + eps * sin(x); }),
                         VectorField3(ScalarField(g, c1), ScalarField(g, 0.2), ScalarField(g, -0.4))};
  const auto want = ScalarField::sample(g, [&](double x, double, double) { return -c1 * eps * cos(x); });
  CHECK((fluid_rhs(drift, eos).rho - want).max_abs() <= 1e-13);

  CHECK_THROWS_AS(fluid_rhs(FluidState{ScalarField(g, 0.0), VectorField3(g)}, eos), DensityUnderflow);
}

TEST_CASE("fluid_rhs matches the convolution oracle at N=8") {
  using namespace oracle;
  const GridPtr g = Grid3::make(8);
  const double gcoef = 0.8;
  const Series rho = add(constant(1.0), cos_mode({1, 1, 0}, 0.2));
  VSeries v;
  v.c[0] = sin_mode({0, 0, 1}, 0.3);
  v.c[1] = cos_mode({2, 0, -1}, 0.25);
  v.c[2] = add(sin_mode({1, 0, 0}, 0.1), cos_mode({0, 2, 0}, 0.15));
  VSeries rv;
  for (int d = 0; d < 3; ++d) rv.c[d] = mul(rho, v.c[d]);
  const Series rho_dot = mask(add(Series{}, div(rv), -1.0), 8);
  VSeries v_dot;
  for (int d = 0; d < 3; ++d) {
    Series adv;
    for (int j = 0; j < 3; ++j) adv = add(adv, mul(v.c[j], deriv(v.c[d], j)));
    v_dot.c[d] = mask(add(add(Series{}, adv, -1.0), deriv(rho, d), -gcoef), 8);
  }
  const FluidState u{evaluate(g, rho), evaluate(g, v)};
  const FluidState got = fluid_rhs(u, gross_pitaevskii(gcoef));
  CHECK((got.rho - evaluate(g, rho_dot)).max_abs() <= 1e-12);
  CHECK((got.v - evaluate(g, v_dot)).max_abs() <= 1e-12);
}

TEST_CASE("fluid poisson operator") {
  const GridPtr g = Grid3::make(16);
  gen::Gen r(65);
  const Barotropic eos = isothermal(1.0);
  const FluidState u{ScalarField(g, 1.0) + r.smooth(g, 2, 3, 0.1), r.smooth_vector(g, 2, 0.3)};
  const FluidState zero = fluid_poisson_apply(u, ScalarField(g), VectorField3(g));
  CHECK(zero.rho.max_abs() == 0.0);
  CHECK(zero.v.max_abs() == 0.0);

  // The Hamiltonian vector field J_F dH/dF equals the fluid equations.
  const FluidState dh = fluid_energy_gradient(u, eos);
  const FluidState a = fluid_poisson_apply(u, dh.rho, dh.v);
  const FluidState b = fluid_rhs(u, eos);
  CHECK((a.rho - b.rho).max_abs() <= 1e-10);
  CHECK((a.v - b.v).max_abs() <= 1e-10);

  // Irrotational v drops the cross term.
  const FluidState pot{u.rho, gradient(r.smooth(g, 2))};
  const ScalarField fr = r.smooth(g, 2);
  const VectorField3 fv = r.smooth_vector(g, 2);
  const FluidState c = fluid_poisson_apply(pot, fr, fv);
  CHECK((c.rho + dealias(divergence(fv))).max_abs() <= 1e-12);
  CHECK((c.v + dealias(gradient(fr))).max_abs() <= 1e-12);

  // Antisymmetry: <F, J G> = -<G, J F> for band-limited test functionals.
  const ScalarField gr = r.smooth(g, 2);
  const VectorField3 gv = r.smooth_vector(g, 2);
  const FluidState jf = fluid_poisson_apply(pot, fr, fv), jg = fluid_poisson_apply(pot, gr, gv);
  const double fjg = inner(fr, jg.rho) + inner(fv, jg.v), gjf = inner(gr, jf.rho) + inner(gv, jf.v);
  CHECK(std::abs(fjg + gjf) <= 1e-10 * std::max(1.0, std::abs(fjg)));
}

TEST_CASE("compressible flow conserves mass and energy") {
  const GridPtr g = Grid3::make(16);
  const Barotropic eos = isothermal(1.0);
  FluidState u{ScalarField(g, 1.0) + 0.1 * random_scalar(g, 3, 5), random_solenoidal(g, 3, 0.1, 6)};
  u.v += 0.05 * gradient(random_scalar(g, 3, 7));
  const double m0 = total_mass(u), e0 = fluid_energy(u, eos);
  double dm = 0.0, de = 0.0;
  for (int n = 0; n < 100; ++n) {
    u = step_rk4([&](const FluidState& s) { return fluid_rhs(s, eos); }, u, 1e-2);
    dm = std::max(dm, rel(total_mass(u), m0));
    de = std::max(de, rel(fluid_energy(u, eos), e0));
  }
  CHECK(dm <= 1e-12);
  CHECK(de <= 1e-5);
}

TEST_CASE("clebsch_velocity examples") {
  const GridPtr g = Grid3::make(16);
  gen::Gen r(66);
  const ScalarField one(g, 1.0), zero(g);
  const ScalarField phi = r.smooth(g, 3);
  CHECK((clebsch_velocity({one + 0.1 * r.smooth(g, 2), zero, zero, phi, r.smooth(g, 2), r.smooth(g, 2)}) - gradient(phi)).max_abs() <=
        1e-14);
  const ScalarField a1 = r.smooth(g, 2), b1 = r.smooth(g, 2);
  CHECK((clebsch_velocity({one, a1, zero, zero, b1, r.smooth(g, 2)}) - a1 * gradient(b1)).max_abs() <= 1e-14);
  const auto siny = ScalarField::sample(g, [](double, double y, double) { return sin(y); });
  const auto want = VectorField3::sample(g, [](double, double y, double) { return std::array<double, 3>{0, cos(y), 0}; });
  CHECK((clebsch_velocity({one, one, zero, zero, siny, zero}) - want).max_abs() <= 1e-13);
}

TEST_CASE("clebsch vorticity") {
  const GridPtr g = Grid3::make(16);
  gen::Gen r(67);
  const ScalarField one(g, 1.0);
  for (int k = 0; k < 5; ++k) {
    const ClebschFields c{one, r.smooth(g, 2), r.smooth(g, 2), r.smooth(g, 2), r.smooth(g, 2), r.smooth(g, 2)};
    CHECK((curl(clebsch_velocity(c)) - clebsch_vorticity(c)).max_abs() <= 1e-10);
  }
}

TEST_CASE("clebsch_rhs examples") {
  const GridPtr g = Grid3::make(16);
  gen::Gen r(68);
  const Barotropic eos = isothermal(1.0);
  const ScalarField zero(g);

  // static equilibrium
  const ClebschFields rest{ScalarField(g, 2.0), 0.3 * r.smooth(g, 2), zero, zero, ScalarField(g, 0.4), ScalarField(g, -1.0)};
  const ClebschFields d = clebsch_rhs(rest, eos);
  CHECK((d.phi + ScalarField(g, std::log(2.0))).max_abs() <= 1e-14);
  for (const ScalarField* f : {&d.varrho, &d.alpha1, &d.alpha2, &d.beta1, &d.beta2}) CHECK(f->max_abs() <= 1e-14);

  // Hamilton-Jacobi pair
  const ClebschFields pot{ScalarField(g, 1.0) + 0.1 * r.smooth(g, 2), zero, zero, r.smooth(g, 2), zero, zero};
  const VectorField3 v = gradient(pot.phi);
  const ClebschFields hj = clebsch_rhs(pot, eos, ClebschSubsystem::irrotational);
  CHECK((hj.phi + dealias(0.5 * dot(v, v) + apply(pot.varrho, eos.enthalpy))).max_abs() <= 1e-12);
  CHECK((hj.varrho + dealias(divergence(pot.varrho * v))).max_abs() <= 1e-12);

  // incompressible: varrho, phi frozen; the rest Lie-dragged
  const ClebschFields c{ScalarField(g, 1.0) + 0.1 * r.smooth(g, 2), r.smooth(g, 2), r.smooth(g, 2),
                        r.smooth(g, 2), r.smooth(g, 2), r.smooth(g, 2)};
  const VectorField3 u = clebsch_velocity(c);
  const ClebschFields inc = clebsch_rhs(c, eos, ClebschSubsystem::incompressible);
  CHECK(inc.varrho.max_abs() == 0.0);
  CHECK(inc.phi.max_abs() == 0.0);
  CHECK((inc.alpha2 + dealias(divergence(c.alpha2 * u))).max_abs() <= 1e-12);
  CHECK((inc.beta2 + dealias(dot(u, gradient(c.beta2)))).max_abs() <= 1e-12);

  const ClebschFields epi = clebsch_rhs(c, eos, ClebschSubsystem::epi2d);
  CHECK(epi.alpha2.max_abs() == 0.0);
  CHECK(epi.beta2.max_abs() == 0.0);
  CHECK((epi.alpha1 - inc.alpha1).max_abs() == 0.0);
}

TEST_CASE("clebsch evolution reproduces the fluid equations") {
  const GridPtr g = Grid3::make(16);
  const Barotropic eos = isothermal(1.0);
  const double e = 0.02;
  ClebschFields c{ScalarField::sample(g, [e](double x, double, double z) { return 1 + e * cos(x) * sin(z); }),
                  ScalarField::sample(g, [e](double, double y, double z) { return e * sin(y + z); }),
                  ScalarField::sample(g, [e](double x, double y, double) { return e * cos(x - y); }),
                  ScalarField::sample(g, [e](double x, double y, double) { return e * sin(x + y); }),
                  ScalarField::sample(g, [](double x, double, double z) { return sin(z) + 0.5 * cos(x); }),
                  ScalarField::sample(g, [](double, double y, double z) { return cos(y) + 0.5 * sin(z); })};
  FluidState u{c.varrho, clebsch_velocity(c)};
  double sup = 0.0;
  for (int n = 0; n < 50; ++n) {
    c = step_rk4([&](const ClebschFields& s) { return clebsch_rhs(s, eos); }, c, 5e-3);
    u = step_rk4([&](const FluidState& s) { return fluid_rhs(s, eos); }, u, 5e-3);
    sup = std::max({sup, (c.varrho - u.rho).max_abs(), (clebsch_velocity(c) - u.v).max_abs()});
  }
  CHECK(sup <= 1e-6);
}

TEST_CASE("snapshot and diagnostics output") {
  const GridPtr g = Grid3::make(8);
  const auto f = ScalarField::sample(g, [](double x, double y, double z) { return x + 10 * y + 100 * z; });
  const auto dir = std::filesystem::temp_directory_path() / "nambu_field_test";
  std::filesystem::create_directories(dir);
  const std::string prefix = (dir / "snap").string();
  write_snapshot(prefix, {"f", "g"}, {&f, &f}, 0.25);
  CHECK(std::filesystem::file_size(prefix + ".bin") == 2 * 512 * 8);
  std::ifstream bin(prefix + ".bin", std::ios::binary);
  std::vector<double> back(512);
  bin.read(reinterpret_cast<char*>(back.data()), 512 * 8);
  CHECK(back[g->index(1, 2, 3)] == f[g->index(1, 2, 3)]);
  std::ifstream js(prefix + ".json");
  const auto j = nlohmann::json::parse(js);
  CHECK(j["N"] == 8);
  CHECK(j["time"] == 0.25);
  CHECK_THROWS_AS(write_snapshot(prefix, {"f"}, {&f, &f}, 0.0), DomainError);

  std::ostringstream out;
  write_diagnostics_csv(out, {"energy", "helicity"}, {{0.0, {1.0, 0.1}}, {0.5, {2.0, 1.0 / 3}}});
  CHECK(out.str() == "time,energy,helicity\n0,1,0.10000000000000001\n0.5,2,0.33333333333333331\n");
}
