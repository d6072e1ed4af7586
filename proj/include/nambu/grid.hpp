#pragma once

// Periodic box [0, 2pi)^3 sampled on N^3 points with FFTW-backed spectral
// derivatives. Storage is x-fastest: index = i + N (j + N k).

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

namespace nambu {

using cplx = std::complex<double>;

class Grid3;
using GridPtr = std::shared_ptr<const Grid3>;

class Grid3 {
 public:
  /// N must be a power of two and at least 8.
  static GridPtr make(int n);
  ~Grid3();
  Grid3(const Grid3&) = delete;
  Grid3& operator=(const Grid3&) = delete;

  int n() const noexcept { return n_; }
  std::size_t size() const noexcept { return size_; }
  double length() const noexcept;
  double dx() const noexcept { return length() / n_; }
  double cell_volume() const noexcept { return dx() * dx() * dx(); }
  double volume() const noexcept { return length() * length() * length(); }

  std::size_t index(int i, int j, int k) const noexcept {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(n_) * (j + static_cast<std::size_t>(n_) * k);
  }
  /// Signed wavenumber of storage index i: {-N/2+1, ..., N/2}.
  int wavenumber(int i) const noexcept { return i <= n_ / 2 ? i : i - n_; }
  /// 2/3 rule: keep the mode iff every |k_d| <= N/3.
  bool keep(int i, int j, int k) const noexcept;

  /// Unnormalized forward DFT.
  std::vector<cplx> forward(const std::vector<cplx>& values) const;
  /// Inverse DFT including the 1/N^3 factor.
  std::vector<cplx> inverse(const std::vector<cplx>& spectrum) const;

 private:
  explicit Grid3(int n);
  int n_;
  std::size_t size_;
  void* forward_plan_ = nullptr;
  void* backward_plan_ = nullptr;
};

struct ScalarField {
  GridPtr grid;
  std::vector<double> data;

  ScalarField() = default;
  explicit ScalarField(GridPtr g, double value = 0.0);
  ScalarField(GridPtr g, std::vector<double> values);

  /// Samples f(x, y, z) at the grid points.
  static ScalarField sample(GridPtr g, const std::function<double(double, double, double)>& f);

  std::size_t size() const noexcept { return data.size(); }
  double& operator[](std::size_t i) { return data[i]; }
  double operator[](std::size_t i) const { return data[i]; }

  double min() const;
  double max_abs() const;
  double mean() const;
  /// sum * cell volume
  double integral() const;

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(double s);
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a);
ScalarField operator*(double s, ScalarField a);
ScalarField operator*(ScalarField a, double s);
/// Pointwise product and quotient.
ScalarField operator*(const ScalarField& a, const ScalarField& b);
ScalarField operator/(const ScalarField& a, const ScalarField& b);
/// Pointwise map.
ScalarField apply(const ScalarField& a, const std::function<double(double)>& f);

struct VectorField3 {
  std::array<ScalarField, 3> c;

  VectorField3() = default;
  explicit VectorField3(GridPtr g, double value = 0.0);
  VectorField3(ScalarField x, ScalarField y, ScalarField z);

  static VectorField3 sample(GridPtr g,
                             const std::function<std::array<double, 3>(double, double, double)>& f);

  const GridPtr& grid() const { return c[0].grid; }
  ScalarField& operator[](int d) { return c[d]; }
  const ScalarField& operator[](int d) const { return c[d]; }

  double max_abs() const;
  std::array<double, 3> mean() const;

  VectorField3& operator+=(const VectorField3& o);
  VectorField3& operator-=(const VectorField3& o);
  VectorField3& operator*=(double s);
};

VectorField3 operator+(VectorField3 a, const VectorField3& b);
VectorField3 operator-(VectorField3 a, const VectorField3& b);
VectorField3 operator-(VectorField3 a);
VectorField3 operator*(double s, VectorField3 a);
VectorField3 operator*(VectorField3 a, double s);
/// Scalar times vector, pointwise.
VectorField3 operator*(const ScalarField& s, const VectorField3& v);
VectorField3 cross(const VectorField3& a, const VectorField3& b);
ScalarField dot(const VectorField3& a, const VectorField3& b);
/// sum a . b * cell volume
double inner(const VectorField3& a, const VectorField3& b);
double inner(const ScalarField& a, const ScalarField& b);

struct ComplexField {
  GridPtr grid;
  std::vector<cplx> data;

  ComplexField() = default;
  explicit ComplexField(GridPtr g, cplx value = 0.0);
  static ComplexField sample(GridPtr g, const std::function<cplx(double, double, double)>& f);

  std::size_t size() const noexcept { return data.size(); }
  ScalarField real() const;
  ScalarField imag() const;
  ScalarField abs2() const;
  double max_abs() const;

  ComplexField& operator+=(const ComplexField& o);
  ComplexField& operator-=(const ComplexField& o);
  ComplexField& operator*=(cplx s);
};

ComplexField operator+(ComplexField a, const ComplexField& b);
ComplexField operator-(ComplexField a, const ComplexField& b);
ComplexField operator*(cplx s, ComplexField a);
ComplexField operator*(double s, ComplexField a);

// ---------------------------------------------------------------------------
// Spectral operators. Odd derivatives drop the Nyquist mode so real fields
// stay real.

/// d/dx_d
ScalarField partial(const ScalarField& f, int d);
ComplexField partial(const ComplexField& f, int d);
VectorField3 gradient(const ScalarField& f);
ScalarField divergence(const VectorField3& v);
VectorField3 curl(const VectorField3& v);
ScalarField laplacian(const ScalarField& f);
ComplexField laplacian(const ComplexField& f);
/// Zeros every mode outside the 2/3 mask.
ScalarField dealias(const ScalarField& f);
VectorField3 dealias(const VectorField3& v);
ComplexField dealias(const ComplexField& f);

/// Shared-grid check; throws DomainError on mismatch.
void require_same_grid(const GridPtr& a, const GridPtr& b, const char* who);

}  // namespace nambu
