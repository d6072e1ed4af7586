#include "nambu/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "nambu/clebsch.hpp"
#include "nambu/error.hpp"
#include "nambu/field.hpp"
#include "nambu/madelung.hpp"

namespace nambu {

namespace {

std::string g17(double x) { return fmt::format("{:.17g}", x); }

class Summary {
 public:
  explicit Summary(const RunConfig& c) : text_(to_string(c.experiment)) {}
  Summary& add(std::string_view key, double value) {
    text_ += fmt::format(" {}={}", key, g17(value));
    return *this;
  }
  Summary& add(std::string_view key, long long value) {
    text_ += fmt::format(" {}={}", key, value);
    return *this;
  }
  Summary& add(std::string_view key, std::string_view value) {
    text_ += fmt::format(" {}={}", key, value);
    return *this;
  }
  std::string str() const { return text_; }

 private:
  std::string text_;
};

std::ofstream open_out(const std::string& path, RunResult& result) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(fmt::format("cannot open '{}' for writing", path));
  result.files.push_back(path);
  return out;
}

void prepare_prefix(const std::string& prefix) {
  const auto parent = std::filesystem::path(prefix).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
}

std::uint64_t seed_of(const RunConfig& c) { return c.seed.value_or(0); }

// ---------------------------------------------------------------------------

RunResult run_euler_top(const RunConfig& c) {
  RunResult r;
  const HamiltonianSystem sys = euler_top_system(c.inertia);
  const Trajectory traj = simulate(sys, c.xi0, c.dt, c.steps, c.method, c.tol, c.max_iter);
  const std::vector<std::string> names{"xi1", "xi2", "xi3"};
  {
    auto out = open_out(c.out + ".csv", r);
    write_trajectory_csv(out, traj, names);
  }
  {
    auto out = open_out(c.out + ".json", r);
    out << trajectory_json(traj, names, RunMetadata{to_string(c.experiment), to_string(c.method), c.dt, seed_of(c)});
  }
  r.summary = Summary(c)
                  .add("method", to_string(c.method))
                  .add("dt", c.dt)
                  .add("steps", static_cast<long long>(c.steps))
                  .add("drift_H1", max_relative_drift(traj.series("H1")))
                  .add("drift_H2", max_relative_drift(traj.series("H2")))
                  .add("slope_H1", relative_drift_slope(traj.series("H1")))
                  .str();
  return r;
}

RunResult run_bracket_check(const RunConfig& c) {
  RunResult r;
  std::mt19937_64 rng(seed_of(c));
  auto out = open_out(c.out + ".csv", r);
  out << "algebra,jacobi_residual,antisymmetry_residual,poisson_antisymmetry\n";
  double max_jacobi = 0.0, max_antisym = 0.0, max_poisson = 0.0;
  for (const auto& type : bianchi_types()) {
    const LieAlgebra3 alg = bianchi(type);
    const double jac = jacobi_residual(alg);
    const double anti = antisymmetry_residual(alg);
    const double pois = poisson_antisymmetry_residual(lie_poisson_system(alg), c.samples, rng());
    max_jacobi = std::max(max_jacobi, jac);
    max_antisym = std::max(max_antisym, anti);
    max_poisson = std::max(max_poisson, pois);
    out << fmt::format("{},{},{},{}\n", alg.label, g17(jac), g17(anti), g17(pois));
  }

  double deform_jacobi = 0.0;
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int s = 0; s < c.samples; ++s) {
    Mat3 m;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m(i, j) = normal(rng);
    deform_jacobi = std::max(deform_jacobi, jacobi_residual(deform(0.5 * (m + m.transpose()))));
  }

  const PoissonSystem so3s = so3_system();
  const Observable half = half_norm_squared(3);
  double nambu_lie = 0.0;
  for (int s = 0; s < c.samples; ++s) {
    const Observable g = random_polynomial(3, 3, rng).observable();
    const Observable h = random_polynomial(3, 3, rng).observable();
    const Vec xi = random_point(3, rng);
    const double lhs = nambu_bracket(g.gradient(xi), h.gradient(xi), half.gradient(xi));
    nambu_lie = std::max(nambu_lie, std::abs(lhs - poisson_bracket(so3s, g, h, xi)));
  }

  double fundamental = 0.0;
  const int quintuples = std::min(c.samples, 20);
  for (int s = 0; s < quintuples; ++s) {
    std::vector<Observable> o;
    for (int k = 0; k < 5; ++k) o.push_back(random_polynomial(3, 2, rng).observable());
    fundamental = std::max(fundamental, fundamental_identity_residual(o[0], o[1], o[2], o[3], o[4],
                                                                      Vec3(random_point(3, rng))));
  }

  const double cas_so3 = casimir_check(so3s, half, c.samples, rng());
  const double cas_heis = casimir_check(heisenberg_system(), coordinate(3, 0), c.samples, rng());

  r.summary = Summary(c)
                  .add("max_jacobi", max_jacobi)
                  .add("max_antisymmetry", max_antisym)
                  .add("max_poisson_antisymmetry", max_poisson)
                  .add("deform_jacobi", deform_jacobi)
                  .add("nambu_lie", nambu_lie)
                  .add("fundamental", fundamental)
                  .add("casimir_so3", cas_so3)
                  .add("casimir_heisenberg", cas_heis)
                  .str();
  return r;
}

RunResult run_reduce_check(const RunConfig& c) {
  RunResult r;
  std::mt19937_64 rng(seed_of(c));
  auto out = open_out(c.out + ".csv", r);
  out << "sample,sp6_residual,spin_residual\n";
  double max_sp6 = 0.0, max_spin = 0.0;
  for (int s = 0; s < c.samples; ++s) {
    const Observable g = random_polynomial(3, 3, rng).observable();
    const Observable h = random_polynomial(3, 3, rng).observable();
    const Vec q = random_point(3, rng, 0.5), p = random_point(3, rng, 0.5);
    const double sp6 = reduction_residual_sp6(g, h, CanonicalState(q, p));
    const double spin = spin_reduction_residual(g, h, SpinState(Eigen::Vector4d(random_point(4, rng, 0.5))));
    max_sp6 = std::max(max_sp6, sp6);
    max_spin = std::max(max_spin, spin);
    out << fmt::format("{},{},{}\n", s, g17(sp6), g17(spin));
  }
  const RealizationComparison cmp = compare_realizations_detail(c.xi0, c.inertia, c.dt, c.steps);
  r.summary = Summary(c)
                  .add("max_sp6", max_sp6)
                  .add("max_spin", max_spin)
                  .add("discrepancy", cmp.discrepancy)
                  .add("dt", c.dt)
                  .add("steps", static_cast<long long>(c.steps))
                  .str();
  return r;
}

RunResult run_vortex(const RunConfig& c) {
  RunResult r;
  const GridPtr g = Grid3::make(c.grid_n);
  VectorField3 omega = curl(random_solenoidal(g, c.kmax, c.amplitude, seed_of(c)));
  const double dt = c.dt_set ? c.dt : c.cfl * g->dx() / inv_curl(omega).max_abs();
  const double cfl = cfl_number(omega, dt);

  std::vector<DiagnosticsRow> rows;
  auto record = [&](double t) {
    rows.push_back({t, {kinetic_energy(omega), helicity(omega), g->volume()}});
  };
  record(0.0);
  const auto rhs = [](const VectorField3& w) { return vortex_rhs(w); };
  for (int n = 1; n <= c.steps; ++n) {
    omega = step_rk4(rhs, omega, dt);
    record(n * dt);
  }
  {
    auto out = open_out(c.out + "_diagnostics.csv", r);
    write_diagnostics_csv(out, {"energy", "helicity", "mass"}, rows);
  }
  prepare_prefix(c.out);
  write_snapshot(c.out + "_omega", {"omega_x", "omega_y", "omega_z"}, {&omega[0], &omega[1], &omega[2]},
                 c.steps * dt);
  r.files.push_back(c.out + "_omega.bin");
  r.files.push_back(c.out + "_omega.json");

  std::vector<double> energy, hel;
  for (const auto& row : rows) {
    energy.push_back(row.values[0]);
    hel.push_back(row.values[1]);
  }
  r.summary = Summary(c)
                  .add("drift_helicity", max_relative_drift(hel))
                  .add("drift_energy", max_relative_drift(energy))
                  .add("helicity", hel.front())
                  .add("cfl", cfl)
                  .add("dt", dt)
                  .add("steps", static_cast<long long>(c.steps))
                  .str();
  return r;
}

FluidState random_fluid(const GridPtr& g, const RunConfig& c) {
  const std::uint64_t s = seed_of(c);
  const ScalarField bump = random_scalar(g, c.kmax, s + 1);
  VectorField3 v = random_solenoidal(g, c.kmax, c.amplitude, s);
  v += (0.5 * c.amplitude) * gradient(random_scalar(g, c.kmax, s + 2));
  return FluidState{ScalarField(g, 1.0) + c.amplitude * bump, v};
}

RunResult run_fluid(const RunConfig& c) {
  RunResult r;
  const GridPtr g = Grid3::make(c.grid_n);
  const Barotropic eos = isothermal(c.sound_speed);
  FluidState u = random_fluid(g, c);
  std::vector<DiagnosticsRow> rows;
  auto record = [&](double t) {
    rows.push_back({t, {fluid_energy(u, eos), inner(u.v, curl(u.v)), total_mass(u)}});
  };
  record(0.0);
  const auto rhs = [&eos](const FluidState& s) { return fluid_rhs(s, eos); };
  for (int n = 1; n <= c.steps; ++n) {
    u = step_rk4(rhs, u, c.dt);
    record(n * c.dt);
  }
  {
    auto out = open_out(c.out + "_diagnostics.csv", r);
    write_diagnostics_csv(out, {"energy", "helicity", "mass"}, rows);
  }
  prepare_prefix(c.out);
  write_snapshot(c.out + "_state", {"rho", "v_x", "v_y", "v_z"}, {&u.rho, &u.v[0], &u.v[1], &u.v[2]},
                 c.steps * c.dt);
  r.files.push_back(c.out + "_state.bin");
  r.files.push_back(c.out + "_state.json");

  std::vector<double> energy, mass;
  for (const auto& row : rows) {
    energy.push_back(row.values[0]);
    mass.push_back(row.values[2]);
  }
  r.summary = Summary(c)
                  .add("drift_mass", max_relative_drift(mass))
                  .add("drift_energy", max_relative_drift(energy))
                  .add("dt", c.dt)
                  .add("steps", static_cast<long long>(c.steps))
                  .str();
  return r;
}

ClebschFields random_clebsch(const GridPtr& g, const RunConfig& c) {
  const std::uint64_t s = seed_of(c);
  const double a = c.amplitude;
  return ClebschFields{ScalarField(g, 1.0) + a * random_scalar(g, c.kmax, s),
                       a * random_scalar(g, c.kmax, s + 1),
                       a * random_scalar(g, c.kmax, s + 2),
                       a * random_scalar(g, c.kmax, s + 3),
                       random_scalar(g, c.kmax, s + 4),
                       random_scalar(g, c.kmax, s + 5)};
}

RunResult run_clebsch_fluid(const RunConfig& c) {
  RunResult r;
  const GridPtr g = Grid3::make(c.grid_n);
  const Barotropic eos = isothermal(c.sound_speed);
  ClebschFields cf = random_clebsch(g, c);
  FluidState u{cf.varrho, clebsch_velocity(cf)};
  const auto crhs = [&eos](const ClebschFields& s) { return clebsch_rhs(s, eos); };
  const auto frhs = [&eos](const FluidState& s) { return fluid_rhs(s, eos); };

  std::vector<DiagnosticsRow> rows;
  double sup = 0.0;
  auto record = [&](double t) {
    const VectorField3 v = clebsch_velocity(cf);
    const double e = std::max((u.rho - cf.varrho).max_abs(), (u.v - v).max_abs());
    sup = std::max(sup, e);
    rows.push_back({t, {fluid_energy(FluidState{cf.varrho, v}, eos), inner(v, curl(v)), cf.varrho.integral(), e}});
  };
  record(0.0);
  for (int n = 1; n <= c.steps; ++n) {
    cf = step_rk4(crhs, cf, c.dt);
    u = step_rk4(frhs, u, c.dt);
    record(n * c.dt);
  }
  {
    auto out = open_out(c.out + "_diagnostics.csv", r);
    write_diagnostics_csv(out, {"energy", "helicity", "mass", "sup_error"}, rows);
  }
  r.summary = Summary(c)
                  .add("sup_error", sup)
                  .add("dt", c.dt)
                  .add("steps", static_cast<long long>(c.steps))
                  .str();
  return r;
}

// Node-free spinor: amplitudes 1 + a f_j, phases a g_j (radians), mass split evenly.
SpinorField random_spinor(const GridPtr& g, const RunConfig& c, double hbar, bool shared_phase) {
  const std::uint64_t s = seed_of(c);
  const int n = c.components;
  const ScalarField common = random_scalar(g, c.kmax, s + 100);
  std::vector<ComplexField> comps;
  for (int j = 0; j < n; ++j) {
    const ScalarField amp = random_scalar(g, c.kmax, s + 10 * j);
    const ScalarField ph = shared_phase ? common : random_scalar(g, c.kmax, s + 10 * j + 1);
    ComplexField f(g);
    for (std::size_t i = 0; i < f.size(); ++i)
      f.data[i] = std::polar((1.0 + 0.5 * c.amplitude * amp.data[i]) / std::sqrt(double(n)), c.amplitude * ph.data[i]);
    comps.push_back(std::move(f));
  }
  return SpinorField(std::move(comps), hbar);
}

RunResult run_nls(const RunConfig& c) {
  RunResult r;
  const GridPtr g = Grid3::make(c.grid_n);
  const Barotropic eos = gross_pitaevskii(c.coupling);
  SpinorField psi = random_spinor(g, c, c.hbar, false);
  std::vector<DiagnosticsRow> rows;
  const double norm0 = psi.norm();
  double norm_step = 0.0, prev_norm = norm0;
  auto record = [&](double t) {
    const QuantumEnergy e = quantum_hamiltonian(psi, eos);
    const MadelungData m = madelung_decompose(psi);
    const ClebschFields cf = clebsch_from_madelung(m, psi.n());
    const double norm = psi.norm();
    norm_step = std::max(norm_step, std::abs(norm - prev_norm) / norm0);
    prev_norm = norm;
    rows.push_back({t, {e.classical, helicity_direct(cf), norm, norm, e.operator_form, helicity_clebsch(cf)}});
  };
  record(0.0);
  for (int n = 1; n <= c.steps; ++n) {
    psi = nls_step(psi, c.dt, eos);
    record(n * c.dt);
  }
  {
    auto out = open_out(c.out + "_diagnostics.csv", r);
    write_diagnostics_csv(out, {"energy", "helicity", "mass", "norm", "H_q", "helicity_clebsch"}, rows);
  }
  prepare_prefix(c.out);
  write_spinor_snapshot(c.out + "_psi", psi, c.steps * c.dt);
  r.files.push_back(c.out + "_psi.bin");
  r.files.push_back(c.out + "_psi.json");

  std::vector<double> hq;
  for (const auto& row : rows) hq.push_back(row.values[4]);
  r.summary = Summary(c)
                  .add("norm_drift_per_step", norm_step)
                  .add("drift_H_q", max_relative_drift(hq))
                  .add("dt", c.dt)
                  .add("steps", static_cast<long long>(c.steps))
                  .str();
  return r;
}

RunResult run_correspondence(const RunConfig& c) {
  RunResult r;
  const GridPtr g = Grid3::make(c.grid_n);
  const Barotropic eos = gross_pitaevskii(c.coupling);
  const SpinorField psi = random_spinor(g, c, c.hbar, false);
  const MadelungData m = madelung_decompose(psi);

  const double momentum =
      (momentum_density(psi) - clebsch_velocity(clebsch_from_madelung(m, psi.n()))).max_abs();
  const QuantumEnergy e = quantum_hamiltonian(psi, eos);
  const double forms = std::abs(e.operator_form - e.madelung_form);
  double closed = 0.0;
  const auto s1 = spin_densities(psi);
  const auto s2 = spin_densities_closed_form(m);
  for (std::size_t l = 0; l < s1.size(); ++l) closed = std::max(closed, (s1[l] - s2[l]).max_abs());

  // Same (rho_j, shared phase gradient) data at hbar, hbar/2, hbar/4.
  std::vector<double> quantum;
  for (double h : {c.hbar, 0.5 * c.hbar, 0.25 * c.hbar}) {
    const SpinorField base = random_spinor(g, c, c.hbar, true);
    MadelungData md = madelung_decompose(base);
    md.hbar = h;
    const QuantumEnergy eh = quantum_hamiltonian(madelung_compose(md), eos);
    quantum.push_back(eh.operator_form - eh.classical);
  }
  const double slope = std::log(quantum[0] / quantum[2]) / std::log(4.0);

  auto out = open_out(c.out + "_ccr.csv", r);
  out << "a,b,x,y,residual_re,residual_im\n";
  double ccr = 0.0;
  // every pair on small grids, a fixed sample of pairs otherwise
  const std::size_t size = g->size();
  const bool all_pairs = size <= 512;
  const std::size_t stride = all_pairs ? 1 : size / 64;
  for (int a = 0; a < psi.n(); ++a)
    for (int b = 0; b < psi.n(); ++b)
      for (std::size_t x = 0; x < size; x += stride) {
        std::vector<std::size_t> ys{x, (x + 1) % size, (x + size / 2) % size};
        if (all_pairs) {
          ys.resize(size);
          std::iota(ys.begin(), ys.end(), std::size_t{0});
        }
        for (std::size_t y : ys) {
          const cplx res = ccr_residual(psi, a, b, x, y);
          ccr = std::max(ccr, std::abs(res));
          if (x == 0 && y < 2) out << fmt::format("{},{},{},{},{},{}\n", a, b, x, y, g17(res.real()), g17(res.imag()));
        }
      }

  r.summary = Summary(c)
                  .add("momentum", momentum)
                  .add("hamiltonian_forms", forms)
                  .add("spin_closed_form", closed)
                  .add("hbar_slope", slope)
                  .add("ccr", ccr)
                  .str();
  return r;
}

}  // namespace

RunResult run(const RunConfig& c) {
  validate(c);
  switch (c.experiment) {
    case Experiment::euler_top: return run_euler_top(c);
    case Experiment::bracket_check: return run_bracket_check(c);
    case Experiment::reduce_check: return run_reduce_check(c);
    case Experiment::vortex: return run_vortex(c);
    case Experiment::fluid: return run_fluid(c);
    case Experiment::clebsch_fluid: return run_clebsch_fluid(c);
    case Experiment::nls: return run_nls(c);
    case Experiment::correspondence: return run_correspondence(c);
  }
  throw ConfigError("unhandled experiment");
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const DomainError*>(&e)) return 2;
  if (dynamic_cast<const NumericalError*>(&e)) return 3;
  return 1;
}

std::string error_json(const std::exception& e) {
  std::string kind = "error";
  if (dynamic_cast<const ConfigError*>(&e)) kind = "config";
  else if (dynamic_cast<const DomainError*>(&e)) kind = "domain";
  else if (dynamic_cast<const ConvergenceError*>(&e)) kind = "convergence";
  else if (dynamic_cast<const DensityUnderflow*>(&e)) kind = "density_underflow";
  else if (dynamic_cast<const NumericalError*>(&e)) kind = "numerical";
  nlohmann::ordered_json j;
  j["error"] = kind;
  j["message"] = e.what();
  j["exit_code"] = exit_code_for(e);
  return j.dump();
}

}  // namespace nambu
