#pragma once

// Ideal fluids on the periodic box: vorticity dynamics through curl^-1, the
// compressible barotropic fluid, and its Clebsch parameterization.

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "nambu/grid.hpp"

namespace nambu {

constexpr double kDefaultRhoFloor = 1e-8;

// ---------------------------------------------------------------------------
// Vorticity

/// Throws DomainError unless div omega and the mean of omega vanish to
/// 1e-10 * max(1, |omega|_inf).
void require_vorticity(const VectorField3& omega, const char* who);

/// v_k = i k x omega_k / |k|^2 (zero mean). Inverse of curl on divergence-free,
/// zero-mean fields.
VectorField3 inv_curl(const VectorField3& omega);

/// d omega / dt = curl((curl^-1 omega) x omega), product dealiased.
VectorField3 vortex_rhs(const VectorField3& omega);

/// 1/2 <curl^-1 omega, omega>
double helicity(const VectorField3& omega);

/// 1/2 int |curl^-1 omega|^2
double kinetic_energy(const VectorField3& omega);

/// max |curl^-1 omega| dt / dx, the advective CFL number.
double cfl_number(const VectorField3& omega, double dt);

/// Random divergence-free, zero-mean field with modes |k_i| <= kmax and
/// spectral amplitude scaled so max |v| is about `amplitude`.
VectorField3 random_solenoidal(GridPtr grid, int kmax, double amplitude, unsigned long long seed);

/// Random smooth real field with modes |k_i| <= kmax, zero mean, max |f| = 1.
ScalarField random_scalar(GridPtr grid, int kmax, unsigned long long seed);

// ---------------------------------------------------------------------------
// Barotropic fluid

/// Enthalpy h(rho) with internal energy eps(rho), d(rho eps)/d rho = h.
struct Barotropic {
  std::function<double(double)> enthalpy;
  std::function<double(double)> internal_energy;
  std::string name;
};

/// h = c^2 log rho, eps = c^2 (log rho - 1)
Barotropic isothermal(double sound_speed);
/// h = g rho, eps = g rho / 2
Barotropic gross_pitaevskii(double g);

struct FluidState {
  ScalarField rho;
  VectorField3 v;

  FluidState& operator+=(const FluidState& o);
  FluidState& operator*=(double s);
};

FluidState operator+(FluidState a, const FluidState& b);
FluidState operator-(FluidState a, const FluidState& b);
FluidState operator*(double s, FluidState a);

/// Throws DensityUnderflow if min rho <= floor.
void require_density(const ScalarField& rho, double floor, const char* who);

/// (-div(rho v), -(v . grad) v - grad h(rho)), dealiased.
FluidState fluid_rhs(const FluidState& u, const Barotropic& eos, double rho_floor = kDefaultRhoFloor);

/// J_F applied to (F_rho, F_v): (-div F_v, -grad F_rho - (curl v / rho) x F_v), dealiased.
FluidState fluid_poisson_apply(const FluidState& u, const ScalarField& f_rho, const VectorField3& f_v,
                               double rho_floor = kDefaultRhoFloor);

/// (1/2 |v|^2 + h, rho v): the functional derivative of the fluid energy.
FluidState fluid_energy_gradient(const FluidState& u, const Barotropic& eos);

/// int (1/2 |v|^2 + eps(rho)) rho
double fluid_energy(const FluidState& u, const Barotropic& eos);
double total_mass(const FluidState& u);

// ---------------------------------------------------------------------------
// Clebsch parameterization

struct ClebschFields {
  ScalarField varrho, alpha1, alpha2;  ///< densities
  ScalarField phi, beta1, beta2;       ///< scalars

  ClebschFields& operator+=(const ClebschFields& o);
  ClebschFields& operator*=(double s);
};

ClebschFields operator+(ClebschFields a, const ClebschFields& b);
ClebschFields operator*(double s, ClebschFields a);

/// Which fields evolve. incompressible freezes varrho and phi; epi2d evolves
/// only alpha1 and beta1; irrotational only varrho and phi.
enum class ClebschSubsystem { general, incompressible, epi2d, irrotational };

/// grad phi + (alpha1 / varrho) grad beta1 + (alpha2 / varrho) grad beta2
VectorField3 clebsch_velocity(const ClebschFields& c, double rho_floor = kDefaultRhoFloor);

/// Lie-dragged densities and scalars with the phi source 1/2 |v|^2 - h.
ClebschFields clebsch_rhs(const ClebschFields& c, const Barotropic& eos,
                          ClebschSubsystem subsystem = ClebschSubsystem::general,
                          double rho_floor = kDefaultRhoFloor);

/// grad alpha1 x grad beta1 + grad alpha2 x grad beta2
VectorField3 clebsch_vorticity(const ClebschFields& c);

// ---------------------------------------------------------------------------
// Output

/// <prefix>.bin holds each field in turn as little-endian f64, x fastest;
/// <prefix>.json records N, field names and time.
void write_snapshot(const std::string& prefix, const std::vector<std::string>& names,
                    const std::vector<const ScalarField*>& fields, double time);

struct DiagnosticsRow {
  double time = 0.0;
  std::vector<double> values;
};

/// Header "time,<columns...>", 17 significant digits.
void write_diagnostics_csv(std::ostream& out, const std::vector<std::string>& columns,
                           const std::vector<DiagnosticsRow>& rows);

}  // namespace nambu
