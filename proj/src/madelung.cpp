#include "nambu/madelung.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "nambu/error.hpp"

namespace nambu {

namespace {

using Mat3c = std::array<std::array<cplx, 3>, 3>;

const cplx I(0.0, 1.0);

std::vector<Mat3c> pauli() {
  return {Mat3c{{{0.0, 1.0, 0.0}, {1.0, 0.0, 0.0}, {}}},
          Mat3c{{{0.0, -I, 0.0}, {I, 0.0, 0.0}, {}}},
          Mat3c{{{1.0, 0.0, 0.0}, {0.0, -1.0, 0.0}, {}}}};
}

std::vector<Mat3c> gell_mann() {
  const double r3 = 1.0 / std::sqrt(3.0);
  return {Mat3c{{{0.0, 1.0, 0.0}, {1.0, 0.0, 0.0}, {0.0, 0.0, 0.0}}},
          Mat3c{{{0.0, -I, 0.0}, {I, 0.0, 0.0}, {0.0, 0.0, 0.0}}},
          Mat3c{{{1.0, 0.0, 0.0}, {0.0, -1.0, 0.0}, {0.0, 0.0, 0.0}}},
          Mat3c{{{0.0, 0.0, 1.0}, {0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}}},
          Mat3c{{{0.0, 0.0, -I}, {0.0, 0.0, 0.0}, {I, 0.0, 0.0}}},
          Mat3c{{{0.0, 0.0, 0.0}, {0.0, 0.0, 1.0}, {0.0, 1.0, 0.0}}},
          Mat3c{{{0.0, 0.0, 0.0}, {0.0, 0.0, -I}, {0.0, I, 0.0}}},
          Mat3c{{{r3, 0.0, 0.0}, {0.0, r3, 0.0}, {0.0, 0.0, -2.0 * r3}}}};
}

void write_le(std::ofstream& out, double x) {
  auto bits = std::bit_cast<std::uint64_t>(x);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  char bytes[8];
  std::memcpy(bytes, &bits, 8);
  out.write(bytes, 8);
}

// Sparse derivative of a single field value with respect to the canonical
// pairs (rho_j(z), S_j(z)).
struct Partial {
  int component;
  std::size_t point;
  cplx d_rho;
  cplx d_s;
};

}  // namespace

SpinorField::SpinorField(std::vector<ComplexField> components, double hbar_)
    : psi(std::move(components)), hbar(hbar_) {
  if (psi.empty() || psi.size() > 3)
    throw DomainError(fmt::format("SpinorField: need 1..3 components, got {}", psi.size()));
  if (!(hbar > 0.0)) throw DomainError("SpinorField: hbar must be positive");
  for (const auto& c : psi) require_same_grid(psi.front().grid, c.grid, "SpinorField");
}

ScalarField SpinorField::density() const {
  ScalarField rho(grid());
  for (const auto& c : psi) rho += c.abs2();
  return rho;
}

double SpinorField::norm() const { return density().integral(); }

MadelungData madelung_decompose(const SpinorField& psi, double rho_floor) {
  MadelungData m;
  m.hbar = psi.hbar;
  for (int j = 0; j < psi.n(); ++j) {
    ScalarField rho = psi.psi[j].abs2();
    const double lo = rho.min();
    if (!(lo > rho_floor))
      throw DensityUnderflow(
          fmt::format("madelung_decompose: component {} has a node (|psi|^2 = {:.3e}), phase undefined", j + 1, lo), lo);
    ScalarField s(psi.grid());
    for (std::size_t i = 0; i < s.size(); ++i) s.data[i] = psi.hbar * std::arg(psi.psi[j].data[i]);
    m.rho.push_back(std::move(rho));
    m.S.push_back(std::move(s));
  }
  return m;
}

SpinorField madelung_compose(const MadelungData& m) {
  if (m.rho.size() != m.S.size() || m.rho.empty())
    throw DomainError("madelung_compose: need matching, nonempty rho and S lists");
  std::vector<ComplexField> comps;
  for (std::size_t j = 0; j < m.rho.size(); ++j) {
    ComplexField c(m.rho[j].grid);
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (m.rho[j].data[i] < 0.0) throw DomainError("madelung_compose: negative density");
      c.data[i] = std::polar(std::sqrt(m.rho[j].data[i]), m.S[j].data[i] / m.hbar);
    }
    comps.push_back(std::move(c));
  }
  return SpinorField(std::move(comps), m.hbar);
}

ClebschFields clebsch_from_madelung(const MadelungData& m, int n) {
  if (n < 1 || n > 3 || static_cast<int>(m.rho.size()) != n || static_cast<int>(m.S.size()) != n)
    throw DomainError(fmt::format("clebsch_from_madelung: n = {} but data has {} components", n, m.rho.size()));
  const auto& r = m.rho;
  const auto& s = m.S;
  const ScalarField zero(r[0].grid);
  switch (n) {
    case 1:
      return ClebschFields{r[0], zero, zero, s[0], zero, zero};
    case 2:
      return ClebschFields{r[0] + r[1], r[0] - r[1], zero, 0.5 * (s[0] + s[1]), 0.5 * (s[0] - s[1]), zero};
    default:
      return ClebschFields{r[0] + r[1] + r[2],
                           r[0] - r[2],
                           0.5 * r[0] - r[1] + 0.5 * r[2],
                           (1.0 / 3.0) * (s[0] + s[1] + s[2]),
                           0.5 * (s[0] - s[2]),
                           (1.0 / 3.0) * (s[0] - 2.0 * s[1] + s[2])};
  }
}

VectorField3 momentum_density(const SpinorField& psi, double rho_floor) {
  const ScalarField rho = psi.density();
  require_density(rho, rho_floor, "momentum_density");
  VectorField3 out(psi.grid());
  for (const auto& c : psi.psi)
    for (int d = 0; d < 3; ++d) {
      const ComplexField dc = partial(c, d);
      for (std::size_t i = 0; i < c.size(); ++i)
        out[d].data[i] += psi.hbar * std::imag(std::conj(c.data[i]) * dc.data[i]);
    }
  for (int d = 0; d < 3; ++d) out[d] = out[d] / rho;
  return out;
}

std::vector<ScalarField> spin_densities(const SpinorField& psi, double rho_floor) {
  const ScalarField rho = psi.density();
  require_density(rho, rho_floor, "spin_densities");
  std::vector<Mat3c> mats;
  if (psi.n() == 2) mats = pauli();
  if (psi.n() == 3) mats = gell_mann();
  std::vector<ScalarField> out;
  for (const auto& lam : mats) {
    ScalarField s(psi.grid());
    for (std::size_t i = 0; i < s.size(); ++i) {
      cplx acc = 0.0;
      for (int a = 0; a < psi.n(); ++a)
        for (int b = 0; b < psi.n(); ++b)
          acc += std::conj(psi.psi[a].data[i]) * lam[a][b] * psi.psi[b].data[i];
      s.data[i] = acc.real() / rho.data[i];
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<ScalarField> spin_densities_closed_form(const MadelungData& m) {
  const int n = static_cast<int>(m.rho.size());
  if (n == 1) return {};
  const GridPtr& g = m.rho[0].grid;
  ScalarField rho(g);
  for (const auto& r : m.rho) rho += r;
  const double hb = m.hbar;

  // 2 sqrt(rho_a rho_b) / rho times cos or -sin of (S_a - S_b) / hbar
  auto pair = [&](int a, int b, bool sine) {
    ScalarField out(g);
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double amp = 2.0 * std::sqrt(m.rho[a].data[i] * m.rho[b].data[i]) / rho.data[i];
      const double ph = (m.S[a].data[i] - m.S[b].data[i]) / hb;
      out.data[i] = sine ? -amp * std::sin(ph) : amp * std::cos(ph);
    }
    return out;
  };
  if (n == 2) return {pair(0, 1, false), pair(0, 1, true), (m.rho[0] - m.rho[1]) / rho};
  const double r3 = 1.0 / std::sqrt(3.0);
  return {pair(0, 1, false), pair(0, 1, true), (m.rho[0] - m.rho[1]) / rho,
          pair(0, 2, false), pair(0, 2, true), pair(1, 2, false), pair(1, 2, true),
          r3 * ((m.rho[0] + m.rho[1] - 2.0 * m.rho[2]) / rho)};
}

QuantumEnergy quantum_hamiltonian(const SpinorField& psi, const Barotropic& eos, double rho_floor) {
  const ScalarField rho = psi.density();
  require_density(rho, rho_floor, "quantum_hamiltonian");
  const double hb = psi.hbar;
  const GridPtr& g = psi.grid();
  const double internal = (apply(rho, eos.internal_energy) * rho).integral();

  QuantumEnergy e;
  double kinetic = 0.0;
  for (const auto& c : psi.psi) {
    const ComplexField lap = laplacian(c);
    double acc = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) acc += std::real(std::conj(c.data[i]) * lap.data[i]);
    kinetic += -0.5 * hb * hb * acc * g->cell_volume();
  }
  e.operator_form = kinetic + internal;

  const MadelungData m = madelung_decompose(psi, rho_floor);
  const VectorField3 v = clebsch_velocity(clebsch_from_madelung(m, psi.n()), rho_floor);
  e.classical = (0.5 * dot(v, v) * rho).integral() + internal;

  const VectorField3 grad_rho = gradient(rho);
  ScalarField q = dot(grad_rho, grad_rho) / (rho * rho);
  for (const auto& s : spin_densities_closed_form(m)) {
    const VectorField3 gs = gradient(s);
    q += dot(gs, gs);
  }
  e.quantum = hb * hb / 8.0 * (q * rho).integral();
  e.madelung_form = e.classical + e.quantum;
  return e;
}

SpinorField nls_step(const SpinorField& psi, double dt, const Barotropic& eos, const ScalarField* external) {
  if (!(dt > 0.0)) throw DomainError("nls_step: dt must be positive");
  const GridPtr& g = psi.grid();
  const int n = g->n();
  const double hb = psi.hbar;

  std::vector<cplx> half(g->size());
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const double kx = g->wavenumber(i), ky = g->wavenumber(j), kz = g->wavenumber(k);
        half[g->index(i, j, k)] = std::polar(1.0, -hb * (kx * kx + ky * ky + kz * kz) * dt / 4.0);
      }
  auto kinetic = [&](ComplexField& f) {
    auto spec = g->forward(f.data);
    for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= half[i];
    f.data = g->inverse(spec);
  };

  SpinorField out = psi;
  for (auto& c : out.psi) kinetic(c);
  const ScalarField rho = out.density();
  for (std::size_t i = 0; i < rho.size(); ++i) {
    double pot = eos.enthalpy(rho.data[i]);
    if (external) pot += external->data[i];
    const cplx rot = std::polar(1.0, -pot * dt / hb);
    for (auto& c : out.psi) c.data[i] *= rot;
  }
  for (auto& c : out.psi) kinetic(c);
  return out;
}

ScalarField quantum_pressure(const ScalarField& rho, double hbar, double rho_floor) {
  require_density(rho, rho_floor, "quantum_pressure");
  const ScalarField a = apply(rho, [](double r) { return std::sqrt(r); });
  return (0.5 * hbar * hbar) * (laplacian(a) / a);
}

VectorField3 quantum_force(const ScalarField& rho, const std::vector<ScalarField>& spin, double hbar,
                           double rho_floor) {
  require_density(rho, rho_floor, "quantum_force");
  const ScalarField a = apply(rho, [](double r) { return std::sqrt(r); });
  VectorField3 f = gradient(laplacian(a) / a);
  for (const auto& s : spin) {
    const VectorField3 gs = gradient(s);
    for (int i = 0; i < 3; ++i) {
      VectorField3 flux(rho * gs[i] * gs[0], rho * gs[i] * gs[1], rho * gs[i] * gs[2]);
      f[i] -= divergence(flux) / (2.0 * rho);
    }
  }
  return (0.5 * hbar * hbar) * f;
}

double helicity_clebsch(const ClebschFields& c, double rho_floor) {
  require_density(c.varrho, rho_floor, "helicity_clebsch");
  const ScalarField a1 = c.alpha1 / c.varrho;
  const ScalarField a2 = c.alpha2 / c.varrho;
  const VectorField3 w = a2 * gradient(a1) - a1 * gradient(a2);
  return dot(w, cross(gradient(c.beta1), gradient(c.beta2))).integral();
}

double helicity_direct(const ClebschFields& c, double rho_floor) {
  const VectorField3 v = clebsch_velocity(c, rho_floor);
  return inner(v, curl(v));
}

cplx ccr_residual(const SpinorField& reference, int a, int b, std::size_t x, std::size_t y, double rho_floor) {
  const int n = reference.n();
  const std::size_t size = reference.grid()->size();
  if (a < 0 || a >= n || b < 0 || b >= n) throw DomainError("ccr_residual: component index out of range");
  if (x >= size || y >= size) throw DomainError("ccr_residual: grid index out of range");
  const double hb = reference.hbar;

  auto psi_partials = [&](int comp, std::size_t pt, bool conjugate) {
    const cplx z = reference.psi[comp].data[pt];
    const double r = std::norm(z);
    if (!(r > rho_floor))
      throw DensityUnderflow(fmt::format("ccr_residual: node at component {}", comp + 1), r);
    const cplx val = conjugate ? std::conj(z) : z;
    // psi = sqrt(rho) exp(i S / hbar)
    return Partial{comp, pt, val / (2.0 * r), (conjugate ? -I : I) * val / hb};
  };
  const std::vector<Partial> f{psi_partials(a, x, false)};
  const std::vector<Partial> h{psi_partials(b, y, true)};

  const double weight = 1.0 / reference.grid()->cell_volume();
  cplx bracket = 0.0;
  for (const auto& pf : f)
    for (const auto& ph : h)
      if (pf.component == ph.component && pf.point == ph.point)
        bracket += weight * (pf.d_rho * ph.d_s - pf.d_s * ph.d_rho);

  const cplx expected = (a == b && x == y) ? weight / (I * hb) : cplx(0.0);
  return bracket - expected;
}

void write_spinor_snapshot(const std::string& prefix, const SpinorField& psi, double time) {
  std::ofstream bin(prefix + ".bin", std::ios::binary);
  if (!bin) throw ConfigError(fmt::format("cannot open {}.bin for writing", prefix));
  for (const auto& c : psi.psi)
    for (cplx z : c.data) {
      write_le(bin, z.real());
      write_le(bin, z.imag());
    }
  nlohmann::ordered_json j;
  j["n"] = psi.n();
  j["hbar"] = psi.hbar;
  j["N"] = psi.grid()->n();
  j["time"] = time;
  j["dtype"] = "complex128-le-interleaved";
  j["order"] = "component, then x-fastest";
  std::ofstream side(prefix + ".json");
  if (!side) throw ConfigError(fmt::format("cannot open {}.json for writing", prefix));
  side << j.dump(2) << '\n';
}

}  // namespace nambu
