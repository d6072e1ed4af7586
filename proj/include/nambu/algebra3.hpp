#pragma once

// Three-dimensional Lie algebras, Lie-Poisson matrices and the R^3 Nambu
// bracket, together with residual checks for the bracket axioms.

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace nambu {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Structure constants c[l][j][k] of [e_j, e_k] = c[l][j][k] e_l (0-based).
struct LieAlgebra3 {
  std::array<double, 27> c{};
  std::string label;

  double operator()(int l, int j, int k) const { return c[9 * l + 3 * j + k]; }
  double& at(int l, int j, int k) { return c[9 * l + 3 * j + k]; }
};

LieAlgebra3 so3();
LieAlgebra3 heisenberg();

/// Bianchi catalog in the Behr form C^k_ij = eps_ijl n^lk + delta^k_j a_i - delta^k_i a_j
/// with n = diag(n1, n2, n3) and a = (a, 0, 0).
LieAlgebra3 bianchi_algebra(const Vec3& n_diag, double a, std::string label);

/// Types "I", "II", "III", "IV", "V", "VI0", "VIh", "VII0", "VIIh", "VIII", "IX".
LieAlgebra3 bianchi(std::string_view type);
const std::vector<std::string>& bianchi_types();

/// max |c[l][j][k] + c[l][k][j]|
double antisymmetry_residual(const LieAlgebra3& alg);

Vec3 lie_bracket(const LieAlgebra3& alg, const Vec3& x, const Vec3& y);

/// grad_g . (grad_h1 x grad_h2)
double nambu_bracket(const Vec3& grad_g, const Vec3& grad_h1, const Vec3& grad_h2);

/// J_jk(xi) = sum_l c[l][j][k] xi_l, so that {G,H} = <dG, J dH> = <[dG, dH], xi>.
Mat3 lie_poisson_matrix(const LieAlgebra3& alg, const Vec3& xi);

/// [x, y]_M = M^T (x cross y). The result need not satisfy Jacobi.
LieAlgebra3 deform(const Mat3& m);

/// Max over basis triples of |[[e_i,e_j],e_k] + [[e_j,e_k],e_i] + [[e_k,e_i],e_j]|.
double jacobi_residual(const LieAlgebra3& alg);

/// Plain-text key-value format:
///   label = bianchi-IX
///   c = <27 numbers, row-major [l][j][k]>
/// Blank lines and lines starting with '#' are ignored.
LieAlgebra3 parse_algebra(std::string_view text);
LieAlgebra3 load_algebra(const std::string& path);
std::string format_algebra(const LieAlgebra3& alg);

// ---------------------------------------------------------------------------
// Observables

/// Central differences with step cbrt(eps) * max(1, |x_j|).
Vec finite_difference_gradient(const std::function<double(const Vec&)>& f, const Vec& x);

/// A smooth function on phase space. The gradient is analytic when supplied,
/// finite-difference otherwise.
class Observable {
 public:
  using ValueFn = std::function<double(const Vec&)>;
  using GradientFn = std::function<Vec(const Vec&)>;

  Observable() = default;
  explicit Observable(ValueFn value, GradientFn gradient = nullptr, std::string name = {});

  double operator()(const Vec& x) const { return value_(x); }
  Vec gradient(const Vec& x) const;
  bool has_analytic_gradient() const noexcept { return static_cast<bool>(gradient_); }
  const std::string& name() const noexcept { return name_; }
  Observable named(std::string name) const;

 private:
  ValueFn value_;
  GradientFn gradient_;
  std::string name_;
};

/// x_j
Observable coordinate(int dim, int j);
/// 1/2 x^T Q x + b^T x + c (Q is symmetrized).
Observable quadratic_form(const Mat& q, const Vec& b, double c = 0.0, std::string name = {});
/// 1/2 |x|^2
Observable half_norm_squared(int dim);
/// 1/2 sum x_k^2 / I_k
Observable euler_kinetic_energy(const Vec3& inertia);
/// The Nambu bracket {A, B, C} on R^3 viewed as an observable (gradient by differences).
Observable nambu_observable(const Observable& a, const Observable& b, const Observable& c);

/// Sum of monomials with analytic gradient.
class Polynomial {
 public:
  struct Term {
    double coefficient;
    std::vector<int> exponents;
  };

  explicit Polynomial(int dim) : dim_(dim) {}
  Polynomial& add(double coefficient, std::vector<int> exponents);

  int dim() const noexcept { return dim_; }
  const std::vector<Term>& terms() const noexcept { return terms_; }
  double value(const Vec& x) const;
  Vec gradient(const Vec& x) const;
  Observable observable(std::string name = {}) const;

 private:
  int dim_;
  std::vector<Term> terms_;
};

/// Every monomial of total degree 1..degree with N(0,1) coefficients.
Polynomial random_polynomial(int dim, int degree, std::mt19937_64& rng);

Vec random_point(int dim, std::mt19937_64& rng, double scale = 1.0);

/// Max relative mismatch between the observable's gradient and central differences.
double gradient_self_test(const Observable& obs, int dim, int samples, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Poisson systems

struct PoissonSystem {
  int dim = 0;
  std::function<Mat(const Vec&)> poisson_matrix;
  std::vector<Observable> casimirs;
  std::string label;

  Mat J(const Vec& xi) const { return poisson_matrix(xi); }
};

PoissonSystem lie_poisson_system(const LieAlgebra3& alg, std::vector<Observable> casimirs = {});
/// so(3)* with Casimir 1/2 |xi|^2.
PoissonSystem so3_system();
/// Heisenberg (r, q, p) with Casimir r.
PoissonSystem heisenberg_system();
/// R^{2n} with J_c = [[0, I], [-I, 0]].
PoissonSystem canonical_system(int n);

/// <dG, J(xi) dH>
double poisson_bracket(const PoissonSystem& sys, const Observable& g, const Observable& h,
                       const Vec& xi);

/// |LHS - RHS| of {{A,B,C},H1,H2} = {{A,H1,H2},B,C} + {A,{B,H1,H2},C} + {A,B,{C,H1,H2}}
/// for the R^3 determinant bracket.
double fundamental_identity_residual(const Observable& a, const Observable& b, const Observable& c,
                                     const Observable& h1, const Observable& h2, const Vec3& xi);

/// max over seeded samples of |J(xi) dC(xi)| / (1 + |xi|^2)
double casimir_check(const PoissonSystem& sys, const Observable& casimir, int samples,
                     std::uint64_t seed);

/// max over seeded samples of |J + J^T|
double poisson_antisymmetry_residual(const PoissonSystem& sys, int samples, std::uint64_t seed);

/// (xi / I) x xi
Vec3 euler_top_rhs(const Vec3& xi, const Vec3& inertia);

}  // namespace nambu
