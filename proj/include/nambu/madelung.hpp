#pragma once

// Multi-component wave functions and their fluid (Madelung / Clebsch)
// variables: decomposition, spin densities, quantum Hamiltonian, split-step
// evolution and the discrete canonical brackets of psi.

#include <string>
#include <vector>

#include "nambu/field.hpp"

namespace nambu {

struct SpinorField {
  std::vector<ComplexField> psi;
  double hbar = 1.0;

  SpinorField() = default;
  /// 1 <= n <= 3 components on one grid, hbar > 0.
  SpinorField(std::vector<ComplexField> components, double hbar_);

  int n() const noexcept { return static_cast<int>(psi.size()); }
  const GridPtr& grid() const { return psi.front().grid; }
  /// sum_j |psi_j|^2
  ScalarField density() const;
  /// int rho
  double norm() const;
};

struct MadelungData {
  std::vector<ScalarField> rho;
  std::vector<ScalarField> S;  ///< hbar * principal phase
  double hbar = 1.0;
};

/// rho_j = |psi_j|^2, S_j = hbar arg psi_j. Throws DensityUnderflow at a node
/// (|psi_j|^2 <= rho_floor) since the phase is undefined there.
MadelungData madelung_decompose(const SpinorField& psi, double rho_floor = kDefaultRhoFloor);
SpinorField madelung_compose(const MadelungData& m);

/// Linear change to (varrho, alpha, phi, beta) for n = 1, 2, 3. Unused Clebsch
/// slots are zero.
ClebschFields clebsch_from_madelung(const MadelungData& m, int n);

/// hbar Im(Psi^* . grad Psi) / rho
VectorField3 momentum_density(const SpinorField& psi, double rho_floor = kDefaultRhoFloor);

/// Psi^* lambda_l Psi / rho with Pauli matrices (n = 2, 3 fields) or
/// Gell-Mann matrices (n = 3, 8 fields). n = 1 gives an empty list.
std::vector<ScalarField> spin_densities(const SpinorField& psi, double rho_floor = kDefaultRhoFloor);

/// The same densities from (rho_j, S_j) via the closed cosine/sine forms.
std::vector<ScalarField> spin_densities_closed_form(const MadelungData& m);

struct QuantumEnergy {
  double operator_form = 0.0;  ///< int Psi^* (-hbar^2/2 lap + eps) Psi
  double madelung_form = 0.0;  ///< fluid energy plus the hbar^2/8 gradient terms
  double classical = 0.0;      ///< int (|v|^2/2 + eps) rho
  double quantum = 0.0;        ///< madelung_form - classical
};

QuantumEnergy quantum_hamiltonian(const SpinorField& psi, const Barotropic& eos,
                                  double rho_floor = kDefaultRhoFloor);

/// Strang splitting: half kinetic step in Fourier space, phase rotation by
/// h(rho) + external, half kinetic step. `external` may be null.
SpinorField nls_step(const SpinorField& psi, double dt, const Barotropic& eos,
                     const ScalarField* external = nullptr);

/// (hbar^2/2) lap sqrt(rho) / sqrt(rho)
ScalarField quantum_pressure(const ScalarField& rho, double hbar, double rho_floor = kDefaultRhoFloor);

/// (hbar^2/2) { grad(lap sqrt(rho) / sqrt(rho)) - sum_l div[rho grad S_l (x) grad S_l] / (2 rho) }
VectorField3 quantum_force(const ScalarField& rho, const std::vector<ScalarField>& spin, double hbar,
                           double rho_floor = kDefaultRhoFloor);

/// int [(a2 / rho) grad(a1 / rho) - (a1 / rho) grad(a2 / rho)] . grad b1 x grad b2
double helicity_clebsch(const ClebschFields& c, double rho_floor = kDefaultRhoFloor);

/// int v . curl v for the Clebsch velocity
double helicity_direct(const ClebschFields& c, double rho_floor = kDefaultRhoFloor);

/// {psi_a(x), psi_b^*(y)} with every (rho_j(z), S_j(z)) a canonical pair of
/// weight 1 / cell volume, minus the expected delta_ab delta_xy / (i hbar dV).
/// x and y are flat grid indices.
cplx ccr_residual(const SpinorField& reference, int a, int b, std::size_t x, std::size_t y,
                  double rho_floor = kDefaultRhoFloor);

/// <prefix>.bin: interleaved (re, im) little-endian f64 per component, x
/// fastest; <prefix>.json: n, hbar, N, time.
void write_spinor_snapshot(const std::string& prefix, const SpinorField& psi, double time);

}  // namespace nambu
