#include "nambu/grid.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include <fftw3.h>
#include <fmt/format.h>

#include "nambu/error.hpp"

namespace nambu {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }
fftw_complex* as_fftw(const cplx* p) { return reinterpret_cast<fftw_complex*>(const_cast<cplx*>(p)); }

std::vector<cplx> to_complex(const std::vector<double>& v) { return {v.begin(), v.end()}; }

std::vector<double> real_part(const std::vector<cplx>& v) {
  std::vector<double> out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [](cplx z) { return z.real(); });
  return out;
}

// Multiplies spectrum by i k_d, zeroing the Nyquist plane of direction d.
void times_ik(const Grid3& g, std::vector<cplx>& spec, int d) {
  const int n = g.n();
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const int idx[3] = {i, j, k};
        const int kd = g.wavenumber(idx[d]);
        auto& z = spec[g.index(i, j, k)];
        z = (2 * std::abs(kd) == n) ? cplx(0.0) : cplx(0.0, kd) * z;
      }
}

void times_minus_k2(const Grid3& g, std::vector<cplx>& spec) {
  const int n = g.n();
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const double kx = g.wavenumber(i), ky = g.wavenumber(j), kz = g.wavenumber(k);
        spec[g.index(i, j, k)] *= -(kx * kx + ky * ky + kz * kz);
      }
}

void mask(const Grid3& g, std::vector<cplx>& spec) {
  const int n = g.n();
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        if (!g.keep(i, j, k)) spec[g.index(i, j, k)] = 0.0;
}

template <class F>
void require_grid(const F& f, const char* who) {
  if (!f.grid) throw DomainError(fmt::format("{}: field has no grid", who));
}

}  // namespace

// ---------------------------------------------------------------------------

GridPtr Grid3::make(int n) {
  if (n < 8 || (n & (n - 1)) != 0)
    throw DomainError(fmt::format("Grid3: N must be a power of two >= 8, got {}", n));
  return GridPtr(new Grid3(n));
}

Grid3::Grid3(int n) : n_(n), size_(static_cast<std::size_t>(n) * n * n) {
  std::vector<cplx> a(size_), b(size_);
  std::lock_guard<std::mutex> lock(planner_mutex());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  forward_plan_ = fftw_plan_dft_3d(n, n, n, as_fftw(a.data()), as_fftw(b.data()), FFTW_FORWARD, flags);
  backward_plan_ = fftw_plan_dft_3d(n, n, n, as_fftw(a.data()), as_fftw(b.data()), FFTW_BACKWARD, flags);
  if (!forward_plan_ || !backward_plan_) throw NumericalError("Grid3: FFTW planning failed");
}

Grid3::~Grid3() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  if (backward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
}

double Grid3::length() const noexcept { return 2.0 * std::numbers::pi; }

bool Grid3::keep(int i, int j, int k) const noexcept {
  return 3 * std::abs(wavenumber(i)) <= n_ && 3 * std::abs(wavenumber(j)) <= n_ &&
         3 * std::abs(wavenumber(k)) <= n_;
}

std::vector<cplx> Grid3::forward(const std::vector<cplx>& values) const {
  if (values.size() != size_) throw DomainError("Grid3::forward: size mismatch");
  std::vector<cplx> out(size_);
  fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), as_fftw(values.data()), as_fftw(out.data()));
  return out;
}

std::vector<cplx> Grid3::inverse(const std::vector<cplx>& spectrum) const {
  if (spectrum.size() != size_) throw DomainError("Grid3::inverse: size mismatch");
  std::vector<cplx> out(size_);
  fftw_execute_dft(static_cast<fftw_plan>(backward_plan_), as_fftw(spectrum.data()), as_fftw(out.data()));
  const double scale = 1.0 / static_cast<double>(size_);
  for (auto& z : out) z *= scale;
  return out;
}

void require_same_grid(const GridPtr& a, const GridPtr& b, const char* who) {
  if (!a || !b || a->n() != b->n())
    throw DomainError(fmt::format("{}: fields live on different grids", who));
}

// ---------------------------------------------------------------------------
// ScalarField

ScalarField::ScalarField(GridPtr g, double value) : grid(std::move(g)) {
  require_grid(*this, "ScalarField");
  data.assign(grid->size(), value);
}

ScalarField::ScalarField(GridPtr g, std::vector<double> values)
    : grid(std::move(g)), data(std::move(values)) {
  require_grid(*this, "ScalarField");
  if (data.size() != grid->size())
    throw DomainError(fmt::format("ScalarField: {} values for an N^3 = {} grid", data.size(), grid->size()));
}

ScalarField ScalarField::sample(GridPtr g, const std::function<double(double, double, double)>& f) {
  ScalarField out(g);
  const int n = g->n();
  const double h = g->dx();
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) out.data[g->index(i, j, k)] = f(i * h, j * h, k * h);
  return out;
}

double ScalarField::min() const { return *std::min_element(data.begin(), data.end()); }

double ScalarField::max_abs() const {
  double m = 0.0;
  for (double x : data) m = std::max(m, std::abs(x));
  return m;
}

double ScalarField::mean() const {
  double s = 0.0;
  for (double x : data) s += x;
  return s / static_cast<double>(data.size());
}

double ScalarField::integral() const { return mean() * grid->volume(); }

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  require_same_grid(grid, o.grid, "ScalarField +");
  for (std::size_t i = 0; i < data.size(); ++i) data[i] += o.data[i];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
  require_same_grid(grid, o.grid, "ScalarField -");
  for (std::size_t i = 0; i < data.size(); ++i) data[i] -= o.data[i];
  return *this;
}

ScalarField& ScalarField::operator*=(double s) {
  for (double& x : data) x *= s;
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator-(ScalarField a) { return a *= -1.0; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }
ScalarField operator*(ScalarField a, double s) { return a *= s; }

ScalarField operator*(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid, b.grid, "ScalarField *");
  ScalarField out = a;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] *= b.data[i];
  return out;
}

ScalarField operator/(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid, b.grid, "ScalarField /");
  ScalarField out = a;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] /= b.data[i];
  return out;
}

ScalarField apply(const ScalarField& a, const std::function<double(double)>& f) {
  ScalarField out = a;
  for (double& x : out.data) x = f(x);
  return out;
}

// ---------------------------------------------------------------------------
// VectorField3

VectorField3::VectorField3(GridPtr g, double value)
    : c{ScalarField(g, value), ScalarField(g, value), ScalarField(g, value)} {}

VectorField3::VectorField3(ScalarField x, ScalarField y, ScalarField z)
    : c{std::move(x), std::move(y), std::move(z)} {
  require_same_grid(c[0].grid, c[1].grid, "VectorField3");
  require_same_grid(c[0].grid, c[2].grid, "VectorField3");
}

VectorField3 VectorField3::sample(
    GridPtr g, const std::function<std::array<double, 3>(double, double, double)>& f) {
  VectorField3 out(g);
  const int n = g->n();
  const double h = g->dx();
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const auto v = f(i * h, j * h, k * h);
        const std::size_t idx = g->index(i, j, k);
        for (int d = 0; d < 3; ++d) out.c[d].data[idx] = v[d];
      }
  return out;
}

double VectorField3::max_abs() const {
  return std::max({c[0].max_abs(), c[1].max_abs(), c[2].max_abs()});
}

std::array<double, 3> VectorField3::mean() const { return {c[0].mean(), c[1].mean(), c[2].mean()}; }

VectorField3& VectorField3::operator+=(const VectorField3& o) {
  for (int d = 0; d < 3; ++d) c[d] += o.c[d];
  return *this;
}

VectorField3& VectorField3::operator-=(const VectorField3& o) {
  for (int d = 0; d < 3; ++d) c[d] -= o.c[d];
  return *this;
}

VectorField3& VectorField3::operator*=(double s) {
  for (auto& f : c) f *= s;
  return *this;
}

VectorField3 operator+(VectorField3 a, const VectorField3& b) { return a += b; }
VectorField3 operator-(VectorField3 a, const VectorField3& b) { return a -= b; }
VectorField3 operator-(VectorField3 a) { return a *= -1.0; }
VectorField3 operator*(double s, VectorField3 a) { return a *= s; }
VectorField3 operator*(VectorField3 a, double s) { return a *= s; }

VectorField3 operator*(const ScalarField& s, const VectorField3& v) {
  return VectorField3(s * v.c[0], s * v.c[1], s * v.c[2]);
}

VectorField3 cross(const VectorField3& a, const VectorField3& b) {
  return VectorField3(a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]);
}

ScalarField dot(const VectorField3& a, const VectorField3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

double inner(const ScalarField& a, const ScalarField& b) { return (a * b).integral(); }
double inner(const VectorField3& a, const VectorField3& b) { return dot(a, b).integral(); }

// ---------------------------------------------------------------------------
// ComplexField

ComplexField::ComplexField(GridPtr g, cplx value) : grid(std::move(g)) {
  require_grid(*this, "ComplexField");
  data.assign(grid->size(), value);
}

ComplexField ComplexField::sample(GridPtr g, const std::function<cplx(double, double, double)>& f) {
  ComplexField out(g);
  const int n = g->n();
  const double h = g->dx();
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) out.data[g->index(i, j, k)] = f(i * h, j * h, k * h);
  return out;
}

ScalarField ComplexField::real() const { return ScalarField(grid, real_part(data)); }

ScalarField ComplexField::imag() const {
  ScalarField out(grid);
  for (std::size_t i = 0; i < data.size(); ++i) out.data[i] = data[i].imag();
  return out;
}

ScalarField ComplexField::abs2() const {
  ScalarField out(grid);
  for (std::size_t i = 0; i < data.size(); ++i) out.data[i] = std::norm(data[i]);
  return out;
}

double ComplexField::max_abs() const {
  double m = 0.0;
  for (cplx z : data) m = std::max(m, std::abs(z));
  return m;
}

ComplexField& ComplexField::operator+=(const ComplexField& o) {
  require_same_grid(grid, o.grid, "ComplexField +");
  for (std::size_t i = 0; i < data.size(); ++i) data[i] += o.data[i];
  return *this;
}

ComplexField& ComplexField::operator-=(const ComplexField& o) {
  require_same_grid(grid, o.grid, "ComplexField -");
  for (std::size_t i = 0; i < data.size(); ++i) data[i] -= o.data[i];
  return *this;
}

ComplexField& ComplexField::operator*=(cplx s) {
  for (auto& z : data) z *= s;
  return *this;
}

ComplexField operator+(ComplexField a, const ComplexField& b) { return a += b; }
ComplexField operator-(ComplexField a, const ComplexField& b) { return a -= b; }
ComplexField operator*(cplx s, ComplexField a) { return a *= s; }
ComplexField operator*(double s, ComplexField a) { return a *= cplx(s); }

// ---------------------------------------------------------------------------
// Spectral operators

ScalarField partial(const ScalarField& f, int d) {
  require_grid(f, "partial");
  auto spec = f.grid->forward(to_complex(f.data));
  times_ik(*f.grid, spec, d);
  return ScalarField(f.grid, real_part(f.grid->inverse(spec)));
}

ComplexField partial(const ComplexField& f, int d) {
  require_grid(f, "partial");
  auto spec = f.grid->forward(f.data);
  times_ik(*f.grid, spec, d);
  ComplexField out(f.grid);
  out.data = f.grid->inverse(spec);
  return out;
}

VectorField3 gradient(const ScalarField& f) {
  require_grid(f, "gradient");
  const auto spec = f.grid->forward(to_complex(f.data));
  VectorField3 out(f.grid);
  for (int d = 0; d < 3; ++d) {
    auto s = spec;
    times_ik(*f.grid, s, d);
    out.c[d].data = real_part(f.grid->inverse(s));
  }
  return out;
}

ScalarField divergence(const VectorField3& v) {
  const auto& g = v.grid();
  std::vector<cplx> acc(g->size(), 0.0);
  for (int d = 0; d < 3; ++d) {
    auto s = g->forward(to_complex(v.c[d].data));
    times_ik(*g, s, d);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += s[i];
  }
  return ScalarField(g, real_part(g->inverse(acc)));
}

VectorField3 curl(const VectorField3& v) {
  return VectorField3(partial(v[2], 1) - partial(v[1], 2), partial(v[0], 2) - partial(v[2], 0),
                      partial(v[1], 0) - partial(v[0], 1));
}

ScalarField laplacian(const ScalarField& f) {
  require_grid(f, "laplacian");
  auto spec = f.grid->forward(to_complex(f.data));
  times_minus_k2(*f.grid, spec);
  return ScalarField(f.grid, real_part(f.grid->inverse(spec)));
}

ComplexField laplacian(const ComplexField& f) {
  require_grid(f, "laplacian");
  auto spec = f.grid->forward(f.data);
  times_minus_k2(*f.grid, spec);
  ComplexField out(f.grid);
  out.data = f.grid->inverse(spec);
  return out;
}

ScalarField dealias(const ScalarField& f) {
  require_grid(f, "dealias");
  auto spec = f.grid->forward(to_complex(f.data));
  mask(*f.grid, spec);
  return ScalarField(f.grid, real_part(f.grid->inverse(spec)));
}

VectorField3 dealias(const VectorField3& v) {
  return VectorField3(dealias(v[0]), dealias(v[1]), dealias(v[2]));
}

ComplexField dealias(const ComplexField& f) {
  require_grid(f, "dealias");
  auto spec = f.grid->forward(f.data);
  mask(*f.grid, spec);
  ComplexField out(f.grid);
  out.data = f.grid->inverse(spec);
  return out;
}

}  // namespace nambu
