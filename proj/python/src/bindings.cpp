#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nambu/algebra3.hpp"
#include "nambu/clebsch.hpp"
#include "nambu/config.hpp"
#include "nambu/error.hpp"
#include "nambu/field.hpp"
#include "nambu/integrate.hpp"
#include "nambu/madelung.hpp"
#include "nambu/runner.hpp"

namespace py = pybind11;
using namespace nambu;

namespace {

// Grid arrays are indexed [x, y, z]; the library stores x fastest, which is
// Fortran order.
using FArray = py::array_t<double, py::array::f_style | py::array::forcecast>;
using CArray = py::array_t<cplx, py::array::f_style | py::array::forcecast>;

int grid_size(const py::buffer_info& b, int lead) {
  if (b.ndim != lead + 3 || b.shape[lead] != b.shape[lead + 1] || b.shape[lead] != b.shape[lead + 2])
    throw DomainError("expected an array of shape " + std::string(lead ? "(3, N, N, N)" : "(N, N, N)"));
  return static_cast<int>(b.shape[lead]);
}

ScalarField to_scalar(const FArray& a) {
  const GridPtr g = Grid3::make(grid_size(a.request(), 0));
  return ScalarField(g, std::vector<double>(a.data(), a.data() + g->size()));
}

py::array_t<double> from_scalar(const ScalarField& f) {
  const py::ssize_t n = f.grid->n();
  py::array_t<double, py::array::f_style> out({n, n, n});
  std::copy(f.data.begin(), f.data.end(), out.mutable_data());
  return out;
}

VectorField3 to_vector(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  const int n = grid_size(a.request(), 1);
  const GridPtr g = Grid3::make(n);
  VectorField3 v(g);
  const auto r = a.unchecked<4>();
  for (int d = 0; d < 3; ++d)
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) v[d][g->index(i, j, k)] = r(d, i, j, k);
  return v;
}

py::array_t<double> from_vector(const VectorField3& v) {
  const GridPtr& g = v.grid();
  const int n = g->n();
  py::array_t<double> out({py::ssize_t(3), py::ssize_t(n), py::ssize_t(n), py::ssize_t(n)});
  auto w = out.mutable_unchecked<4>();
  for (int d = 0; d < 3; ++d)
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) w(d, i, j, k) = v[d][g->index(i, j, k)];
  return out;
}

SpinorField to_spinor(const std::vector<CArray>& comps, double hbar) {
  if (comps.empty()) throw DomainError("need at least one component");
  const GridPtr g = Grid3::make(grid_size(comps.front().request(), 0));
  std::vector<ComplexField> psi;
  for (const auto& c : comps) {
    if (grid_size(c.request(), 0) != g->n()) throw DomainError("components must share one grid");
    ComplexField f(g);
    std::copy(c.data(), c.data() + g->size(), f.data.begin());
    psi.push_back(std::move(f));
  }
  return SpinorField(std::move(psi), hbar);
}

std::vector<py::array_t<cplx>> from_spinor(const SpinorField& s) {
  std::vector<py::array_t<cplx>> out;
  const py::ssize_t n = s.grid()->n();
  for (const auto& c : s.psi) {
    py::array_t<cplx, py::array::f_style> a({n, n, n});
    std::copy(c.data.begin(), c.data.end(), a.mutable_data());
    out.push_back(a);
  }
  return out;
}

Barotropic eos_from(const std::string& name, double parameter) {
  if (name == "isothermal") return isothermal(parameter);
  if (name == "gross-pitaevskii") return gross_pitaevskii(parameter);
  throw ConfigError("unknown equation of state '" + name + "'");
}

}  // namespace

PYBIND11_MODULE(_nambu, m) {
  m.doc() = "Nambu and Lie-Poisson dynamics, Clebsch fluids and Madelung spinors";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  auto numerical = py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<ConvergenceError>(m, "ConvergenceError", numerical.ptr());
  py::register_exception<DensityUnderflow>(m, "DensityUnderflow", numerical.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

  // algebra
  py::class_<LieAlgebra3>(m, "LieAlgebra3")
      .def_readonly("label", &LieAlgebra3::label)
      .def("__call__", &LieAlgebra3::operator(), py::arg("l"), py::arg("j"), py::arg("k"))
      .def("__repr__", [](const LieAlgebra3& a) { return "<LieAlgebra3 " + a.label + ">"; });
  m.def("so3", &so3);
  m.def("heisenberg", &heisenberg);
  m.def("bianchi", [](const std::string& t) { return bianchi(t); }, py::arg("type"));
  m.def("bianchi_types", &bianchi_types);
  m.def("deform", &deform, py::arg("m"));
  m.def("jacobi_residual", &jacobi_residual);
  m.def("antisymmetry_residual", &antisymmetry_residual);
  m.def("lie_bracket", &lie_bracket);
  m.def("lie_poisson_matrix", &lie_poisson_matrix);
  m.def("nambu_bracket", &nambu_bracket, py::arg("grad_g"), py::arg("grad_h1"), py::arg("grad_h2"));
  m.def("euler_top_rhs", &euler_top_rhs, py::arg("xi"), py::arg("inertia"));

  // canonical realizations
  m.def("angular_momentum_map", [](const Vec3& q, const Vec3& p) { return angular_momentum_map(CanonicalState(q, p)); });
  m.def("cayley_klein_map", [](const Eigen::Vector4d& z) { return cayley_klein_map(SpinState(z)); });
  m.def("su2_casimir", [](const Eigen::Vector4d& z) { return su2_casimir(SpinState(z)); });
  m.def("gauge_angle_su2", [](const Eigen::Vector4d& z) { return gauge_angle_su2(SpinState(z)); });

  // integration
  m.def(
      "simulate_euler_top",
      [](const Vec3& xi0, const Vec3& inertia, double dt, int steps, const std::string& method) {
        const Trajectory t = simulate(euler_top_system(inertia), xi0, dt, steps, parse_method(method));
        Eigen::MatrixXd states(t.states.size(), 3);
        for (std::size_t i = 0; i < t.states.size(); ++i) states.row(i) = t.states[i].transpose();
        py::dict out;
        out["time"] = t.times;
        out["xi"] = states;
        for (std::size_t k = 0; k < t.invariant_names.size(); ++k) out[py::str(t.invariant_names[k])] = t.invariant_series[k];
        return out;
      },
      py::arg("xi0"), py::arg("inertia"), py::arg("dt"), py::arg("steps"), py::arg("method") = "midpoint");
  m.def("compare_realizations", &compare_realizations, py::arg("xi0"), py::arg("inertia"), py::arg("dt"), py::arg("steps"));
  m.def("max_relative_drift", &max_relative_drift);

  // fields
  m.def("curl", [](const py::array_t<double, py::array::c_style | py::array::forcecast>& v) { return from_vector(curl(to_vector(v))); });
  m.def("inv_curl", [](const py::array_t<double, py::array::c_style | py::array::forcecast>& w) { return from_vector(inv_curl(to_vector(w))); });
  m.def("vortex_rhs", [](const py::array_t<double, py::array::c_style | py::array::forcecast>& w) { return from_vector(vortex_rhs(to_vector(w))); });
  m.def("helicity", [](const py::array_t<double, py::array::c_style | py::array::forcecast>& w) { return helicity(to_vector(w)); });
  m.def("kinetic_energy", [](const py::array_t<double, py::array::c_style | py::array::forcecast>& w) { return kinetic_energy(to_vector(w)); });
  m.def("divergence", [](const py::array_t<double, py::array::c_style | py::array::forcecast>& v) { return from_scalar(divergence(to_vector(v))); });
  m.def("gradient", [](const FArray& f) { return from_vector(gradient(to_scalar(f))); });
  m.def(
      "random_solenoidal",
      [](int n, int kmax, double amplitude, unsigned long long seed) { return from_vector(random_solenoidal(Grid3::make(n), kmax, amplitude, seed)); },
      py::arg("n"), py::arg("kmax"), py::arg("amplitude"), py::arg("seed"));

  // spinors
  m.def(
      "madelung_decompose",
      [](const std::vector<CArray>& psi, double hbar) {
        const MadelungData d = madelung_decompose(to_spinor(psi, hbar));
        std::vector<py::array_t<double>> rho, s;
        for (const auto& f : d.rho) rho.push_back(from_scalar(f));
        for (const auto& f : d.S) s.push_back(from_scalar(f));
        return py::make_tuple(rho, s);
      },
      py::arg("psi"), py::arg("hbar") = 1.0);
  m.def(
      "momentum_density", [](const std::vector<CArray>& psi, double hbar) { return from_vector(momentum_density(to_spinor(psi, hbar))); },
      py::arg("psi"), py::arg("hbar") = 1.0);
  m.def(
      "quantum_hamiltonian",
      [](const std::vector<CArray>& psi, double hbar, const std::string& eos, double parameter) {
        const QuantumEnergy e = quantum_hamiltonian(to_spinor(psi, hbar), eos_from(eos, parameter));
        py::dict out;
        out["operator_form"] = e.operator_form;
        out["madelung_form"] = e.madelung_form;
        out["classical"] = e.classical;
        out["quantum"] = e.quantum;
        return out;
      },
      py::arg("psi"), py::arg("hbar") = 1.0, py::arg("eos") = "gross-pitaevskii", py::arg("parameter") = 0.5);
  m.def(
      "nls_step",
      [](const std::vector<CArray>& psi, double dt, double hbar, const std::string& eos, double parameter) {
        return from_spinor(nls_step(to_spinor(psi, hbar), dt, eos_from(eos, parameter)));
      },
      py::arg("psi"), py::arg("dt"), py::arg("hbar") = 1.0, py::arg("eos") = "gross-pitaevskii", py::arg("parameter") = 0.5);

  // runner
  m.def("experiment_names", &experiment_names);
  m.def(
      "run",
      [](const std::string& config_text) {
        const RunResult r = run(parse_config(config_text));
        return py::make_tuple(r.summary, r.files);
      },
      py::arg("config_text"), "Runs a key = value (or JSON) configuration; returns (summary, files).");
  m.def("format_config", [](const std::string& text) { return format_config(parse_config(text)); });
}
