#include "nambu/field.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <ostream>
#include <random>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "nambu/error.hpp"

namespace nambu {

namespace {

std::vector<cplx> spectrum(const ScalarField& f) {
  return f.grid->forward(std::vector<cplx>(f.data.begin(), f.data.end()));
}

ScalarField real_field(const GridPtr& g, const std::vector<cplx>& spec) {
  const auto x = g->inverse(spec);
  ScalarField out(g);
  for (std::size_t i = 0; i < x.size(); ++i) out.data[i] = x[i].real();
  return out;
}

// Wavenumber as seen by the first-derivative operator (Nyquist -> 0).
int resolved_k(const Grid3& g, int i) {
  const int k = g.wavenumber(i);
  return 2 * std::abs(k) == g.n() ? 0 : k;
}

}  // namespace

// ---------------------------------------------------------------------------
// Vorticity

void require_vorticity(const VectorField3& omega, const char* who) {
  const double scale = std::max(1.0, omega.max_abs());
  const double div = divergence(omega).max_abs();
  if (div > 1e-10 * scale)
    throw DomainError(fmt::format("{}: vorticity is not divergence-free (max |div| = {:.3e})", who, div));
  const auto m = omega.mean();
  const double mean = std::max({std::abs(m[0]), std::abs(m[1]), std::abs(m[2])});
  if (mean > 1e-10 * scale)
    throw DomainError(fmt::format("{}: vorticity has a nonzero mean mode ({:.3e})", who, mean));
}

VectorField3 inv_curl(const VectorField3& omega) {
  require_vorticity(omega, "inv_curl");
  const GridPtr& g = omega.grid();
  const int n = g->n();
  // psi = -lap^-1 omega with the derivative-consistent |k|^2, then v = curl psi.
  VectorField3 psi(g);
  for (int d = 0; d < 3; ++d) {
    auto s = spectrum(omega[d]);
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          const double kx = resolved_k(*g, i), ky = resolved_k(*g, j), kz = resolved_k(*g, k);
          const double k2 = kx * kx + ky * ky + kz * kz;
          auto& z = s[g->index(i, j, k)];
          z = k2 == 0.0 ? cplx(0.0) : z / k2;
        }
    psi[d] = real_field(g, s);
  }
  return curl(psi);
}

VectorField3 vortex_rhs(const VectorField3& omega) {
  const VectorField3 v = inv_curl(omega);
  return dealias(curl(cross(v, omega)));
}

double helicity(const VectorField3& omega) { return 0.5 * inner(inv_curl(omega), omega); }

double kinetic_energy(const VectorField3& omega) {
  const VectorField3 v = inv_curl(omega);
  return 0.5 * inner(v, v);
}

double cfl_number(const VectorField3& omega, double dt) {
  const VectorField3 v = inv_curl(omega);
  return v.max_abs() * dt / omega.grid()->dx();
}

VectorField3 random_solenoidal(GridPtr grid, int kmax, double amplitude, unsigned long long seed) {
  if (kmax < 1 || 3 * kmax > grid->n())
    throw DomainError(fmt::format("random_solenoidal: kmax = {} outside [1, N/3]", kmax));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  struct Mode {
    int k[3];
    double a[3], b[3];
  };
  std::vector<Mode> modes;
  for (int kx = 0; kx <= kmax; ++kx)
    for (int ky = -kmax; ky <= kmax; ++ky)
      for (int kz = -kmax; kz <= kmax; ++kz) {
        const bool upper = kx > 0 || (kx == 0 && ky > 0) || (kx == 0 && ky == 0 && kz > 0);
        if (!upper) continue;
        Mode m{{kx, ky, kz}, {}, {}};
        const double decay = 1.0 / (kx * kx + ky * ky + kz * kz);
        for (int d = 0; d < 3; ++d) {
          m.a[d] = decay * unif(rng);
          m.b[d] = decay * unif(rng);
        }
        modes.push_back(m);
      }
  // Vector potential A; v = curl A is solenoidal with zero mean.
  VectorField3 a = VectorField3::sample(grid, [&](double x, double y, double z) {
    std::array<double, 3> out{0.0, 0.0, 0.0};
    for (const auto& m : modes) {
      const double ph = m.k[0] * x + m.k[1] * y + m.k[2] * z;
      const double c = std::cos(ph), s = std::sin(ph);
      for (int d = 0; d < 3; ++d) out[d] += m.a[d] * c + m.b[d] * s;
    }
    return out;
  });
  VectorField3 v = curl(a);
  const double peak = v.max_abs();
  if (peak > 0.0) v *= amplitude / peak;
  return v;
}

ScalarField random_scalar(GridPtr grid, int kmax, unsigned long long seed) {
  if (kmax < 1 || 3 * kmax > grid->n())
    throw DomainError(fmt::format("random_scalar: kmax = {} outside [1, N/3]", kmax));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  struct Mode {
    int k[3];
    double a, b;
  };
  std::vector<Mode> modes;
  for (int kx = 0; kx <= kmax; ++kx)
    for (int ky = -kmax; ky <= kmax; ++ky)
      for (int kz = -kmax; kz <= kmax; ++kz) {
        if (!(kx > 0 || (kx == 0 && ky > 0) || (kx == 0 && ky == 0 && kz > 0))) continue;
        const double decay = 1.0 / (kx * kx + ky * ky + kz * kz);
        const double a = decay * unif(rng);
        const double b = decay * unif(rng);
        modes.push_back(Mode{{kx, ky, kz}, a, b});
      }
  ScalarField f = ScalarField::sample(grid, [&](double x, double y, double z) {
    double acc = 0.0;
    for (const auto& m : modes) {
      const double ph = m.k[0] * x + m.k[1] * y + m.k[2] * z;
      acc += m.a * std::cos(ph) + m.b * std::sin(ph);
    }
    return acc;
  });
  const double peak = f.max_abs();
  if (peak > 0.0) f *= 1.0 / peak;
  return f;
}

// ---------------------------------------------------------------------------
// Barotropic fluid

Barotropic isothermal(double c) {
  if (!(c > 0.0)) throw DomainError("isothermal: sound speed must be positive");
  const double c2 = c * c;
  return Barotropic{[c2](double rho) { return c2 * std::log(rho); },
                    [c2](double rho) { return c2 * (std::log(rho) - 1.0); },
                    fmt::format("isothermal(c={})", c)};
}

Barotropic gross_pitaevskii(double g) {
  return Barotropic{[g](double rho) { return g * rho; }, [g](double rho) { return 0.5 * g * rho; },
                    fmt::format("gross-pitaevskii(g={})", g)};
}

FluidState& FluidState::operator+=(const FluidState& o) {
  rho += o.rho;
  v += o.v;
  return *this;
}

FluidState& FluidState::operator*=(double s) {
  rho *= s;
  v *= s;
  return *this;
}

FluidState operator+(FluidState a, const FluidState& b) { return a += b; }
FluidState operator-(FluidState a, const FluidState& b) {
  a.rho -= b.rho;
  a.v -= b.v;
  return a;
}
FluidState operator*(double s, FluidState a) { return a *= s; }

void require_density(const ScalarField& rho, double floor, const char* who) {
  const double m = rho.min();
  if (!(m > floor))
    throw DensityUnderflow(fmt::format("{}: density minimum {:.3e} is not above the floor {:.3e}", who, m, floor), m);
}

FluidState fluid_rhs(const FluidState& u, const Barotropic& eos, double rho_floor) {
  require_density(u.rho, rho_floor, "fluid_rhs");
  FluidState out{dealias(-divergence(u.rho * u.v)), VectorField3(u.rho.grid)};
  const VectorField3 grad_h = gradient(apply(u.rho, eos.enthalpy));
  for (int d = 0; d < 3; ++d) {
    ScalarField adv(u.rho.grid);
    for (int j = 0; j < 3; ++j) adv += u.v[j] * partial(u.v[d], j);
    out.v[d] = dealias(-(adv + grad_h[d]));
  }
  return out;
}

FluidState fluid_poisson_apply(const FluidState& u, const ScalarField& f_rho, const VectorField3& f_v,
                               double rho_floor) {
  require_density(u.rho, rho_floor, "fluid_poisson_apply");
  const VectorField3 w = curl(u.v);
  const ScalarField inv_rho = apply(u.rho, [](double r) { return 1.0 / r; });
  return FluidState{dealias(-divergence(f_v)), dealias(-(gradient(f_rho) + cross(inv_rho * w, f_v)))};
}

FluidState fluid_energy_gradient(const FluidState& u, const Barotropic& eos) {
  return FluidState{0.5 * dot(u.v, u.v) + apply(u.rho, eos.enthalpy), u.rho * u.v};
}

double fluid_energy(const FluidState& u, const Barotropic& eos) {
  return ((0.5 * dot(u.v, u.v) + apply(u.rho, eos.internal_energy)) * u.rho).integral();
}

double total_mass(const FluidState& u) { return u.rho.integral(); }

// ---------------------------------------------------------------------------
// Clebsch parameterization

ClebschFields& ClebschFields::operator+=(const ClebschFields& o) {
  varrho += o.varrho;
  alpha1 += o.alpha1;
  alpha2 += o.alpha2;
  phi += o.phi;
  beta1 += o.beta1;
  beta2 += o.beta2;
  return *this;
}

ClebschFields& ClebschFields::operator*=(double s) {
  for (ScalarField* f : {&varrho, &alpha1, &alpha2, &phi, &beta1, &beta2}) *f *= s;
  return *this;
}

ClebschFields operator+(ClebschFields a, const ClebschFields& b) { return a += b; }
ClebschFields operator*(double s, ClebschFields a) { return a *= s; }

VectorField3 clebsch_velocity(const ClebschFields& c, double rho_floor) {
  require_density(c.varrho, rho_floor, "clebsch_velocity");
  return gradient(c.phi) + (c.alpha1 / c.varrho) * gradient(c.beta1) +
         (c.alpha2 / c.varrho) * gradient(c.beta2);
}

ClebschFields clebsch_rhs(const ClebschFields& c, const Barotropic& eos, ClebschSubsystem subsystem,
                          double rho_floor) {
  const VectorField3 v = clebsch_velocity(c, rho_floor);
  const GridPtr& g = c.varrho.grid;
  auto density_drag = [&](const ScalarField& f) { return dealias(-divergence(f * v)); };
  auto scalar_drag = [&](const ScalarField& f) { return dealias(-dot(v, gradient(f))); };
  const ScalarField zero(g);

  ClebschFields out{zero, zero, zero, zero, zero, zero};
  const bool all = subsystem == ClebschSubsystem::general;
  if (all || subsystem == ClebschSubsystem::irrotational) {
    out.varrho = density_drag(c.varrho);
    out.phi = dealias(-dot(v, gradient(c.phi)) + 0.5 * dot(v, v) - apply(c.varrho, eos.enthalpy));
  }
  if (all || subsystem == ClebschSubsystem::incompressible || subsystem == ClebschSubsystem::epi2d) {
    out.alpha1 = density_drag(c.alpha1);
    out.beta1 = scalar_drag(c.beta1);
  }
  if (all || subsystem == ClebschSubsystem::incompressible) {
    out.alpha2 = density_drag(c.alpha2);
    out.beta2 = scalar_drag(c.beta2);
  }
  return out;
}

VectorField3 clebsch_vorticity(const ClebschFields& c) {
  return cross(gradient(c.alpha1), gradient(c.beta1)) + cross(gradient(c.alpha2), gradient(c.beta2));
}

// ---------------------------------------------------------------------------
// Output

void write_snapshot(const std::string& prefix, const std::vector<std::string>& names,
                    const std::vector<const ScalarField*>& fields, double time) {
  if (names.size() != fields.size() || fields.empty())
    throw DomainError("write_snapshot: need one name per field");
  std::ofstream bin(prefix + ".bin", std::ios::binary);
  if (!bin) throw ConfigError(fmt::format("cannot open {}.bin for writing", prefix));
  for (const ScalarField* f : fields) {
    require_same_grid(fields.front()->grid, f->grid, "write_snapshot");
    for (double x : f->data) {
      auto bits = std::bit_cast<std::uint64_t>(x);
      if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
      char bytes[8];
      std::memcpy(bytes, &bits, 8);
      bin.write(bytes, 8);
    }
  }
  nlohmann::ordered_json j;
  j["N"] = fields.front()->grid->n();
  j["L"] = fields.front()->grid->length();
  j["time"] = time;
  j["dtype"] = "float64-le";
  j["order"] = "x-fastest";
  j["fields"] = names;
  std::ofstream side(prefix + ".json");
  if (!side) throw ConfigError(fmt::format("cannot open {}.json for writing", prefix));
  side << j.dump(2) << '\n';
}

void write_diagnostics_csv(std::ostream& out, const std::vector<std::string>& columns,
                           const std::vector<DiagnosticsRow>& rows) {
  out << "time";
  for (const auto& c : columns) out << ',' << c;
  out << '\n';
  for (const auto& r : rows) {
    if (r.values.size() != columns.size())
      throw DomainError("write_diagnostics_csv: row width does not match the header");
    out << fmt::format("{:.17g}", r.time);
    for (double x : r.values) out << ',' << fmt::format("{:.17g}", x);
    out << '\n';
  }
}

}  // namespace nambu
