#include "nambu/algebra3.hpp"

#include <cmath>
#include <memory>
#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/format.h>

#include "nambu/error.hpp"

namespace nambu {

namespace {

double levi_civita(int i, int j, int k) {
  return static_cast<double>((i - j) * (j - k) * (k - i)) / 2.0;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

}  // namespace

LieAlgebra3 bianchi_algebra(const Vec3& n_diag, double a, std::string label) {
  const Vec3 av(a, 0.0, 0.0);
  LieAlgebra3 alg;
  alg.label = std::move(label);
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double v = 0.0;
        for (int l = 0; l < 3; ++l) v += levi_civita(i, j, l) * (l == k ? n_diag[l] : 0.0);
        if (k == j) v += av[i];
        if (k == i) v -= av[j];
        alg.at(k, i, j) = v;
      }
  return alg;
}

LieAlgebra3 so3() { return bianchi_algebra(Vec3(1, 1, 1), 0.0, "so3"); }

LieAlgebra3 heisenberg() { return bianchi_algebra(Vec3(1, 0, 0), 0.0, "heisenberg"); }

const std::vector<std::string>& bianchi_types() {
  static const std::vector<std::string> types = {"I",   "II",   "III",  "IV",   "V",  "VI0",
                                                 "VIh", "VII0", "VIIh", "VIII", "IX"};
  return types;
}

LieAlgebra3 bianchi(std::string_view type) {
  const std::string label = "bianchi-" + std::string(type);
  if (type == "I") return bianchi_algebra(Vec3(0, 0, 0), 0.0, label);
  if (type == "II") return bianchi_algebra(Vec3(1, 0, 0), 0.0, label);
  if (type == "III") return bianchi_algebra(Vec3(0, 1, -1), 1.0, label);
  if (type == "IV") return bianchi_algebra(Vec3(0, 0, 1), 1.0, label);
  if (type == "V") return bianchi_algebra(Vec3(0, 0, 0), 1.0, label);
  if (type == "VI0") return bianchi_algebra(Vec3(0, 1, -1), 0.0, label);
  if (type == "VIh") return bianchi_algebra(Vec3(0, 1, -1), 0.5, label);
  if (type == "VII0") return bianchi_algebra(Vec3(0, 1, 1), 0.0, label);
  if (type == "VIIh") return bianchi_algebra(Vec3(0, 1, 1), 0.5, label);
  if (type == "VIII") return bianchi_algebra(Vec3(1, 1, -1), 0.0, label);
  if (type == "IX") return bianchi_algebra(Vec3(1, 1, 1), 0.0, label);
  throw DomainError(fmt::format("unknown Bianchi type '{}'", type));
}

double antisymmetry_residual(const LieAlgebra3& alg) {
  double r = 0.0;
  for (int l = 0; l < 3; ++l)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) r = std::max(r, std::abs(alg(l, j, k) + alg(l, k, j)));
  return r;
}

Vec3 lie_bracket(const LieAlgebra3& alg, const Vec3& x, const Vec3& y) {
  Vec3 z = Vec3::Zero();
  for (int l = 0; l < 3; ++l)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) z[l] += alg(l, j, k) * x[j] * y[k];
  return z;
}

double nambu_bracket(const Vec3& grad_g, const Vec3& grad_h1, const Vec3& grad_h2) {
  return grad_g.dot(grad_h1.cross(grad_h2));
}

Mat3 lie_poisson_matrix(const LieAlgebra3& alg, const Vec3& xi) {
  Mat3 j = Mat3::Zero();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      for (int l = 0; l < 3; ++l) j(r, c) += alg(l, r, c) * xi[l];
  return j;
}

LieAlgebra3 deform(const Mat3& m) {
  LieAlgebra3 alg;
  alg.label = "deformed-so3";
  for (int l = 0; l < 3; ++l)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        double v = 0.0;
        for (int mm = 0; mm < 3; ++mm) v += m(mm, l) * levi_civita(mm, j, k);
        alg.at(l, j, k) = v;
      }
  return alg;
}

double jacobi_residual(const LieAlgebra3& alg) {
  // [[e_i,e_j],e_k]_p = sum_m c[m][i][j] c[p][m][k]
  auto nested = [&](int i, int j, int k, int p) {
    double s = 0.0;
    for (int m = 0; m < 3; ++m) s += alg(m, i, j) * alg(p, m, k);
    return s;
  };
  double worst = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        Vec3 cyc;
        for (int p = 0; p < 3; ++p) cyc[p] = nested(i, j, k, p) + nested(j, k, i, p) + nested(k, i, j, p);
        worst = std::max(worst, cyc.norm());
      }
  return worst;
}

LieAlgebra3 parse_algebra(std::string_view text) {
  LieAlgebra3 alg;
  bool have_label = false;
  bool have_c = false;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw DomainError(fmt::format("algebra file line {}: expected 'key = value'", lineno));
    const std::string key = trim(std::string_view(t).substr(0, eq));
    std::string value = trim(std::string_view(t).substr(eq + 1));
    if (key == "label") {
      alg.label = value;
      have_label = true;
    } else if (key == "c") {
      for (char& ch : value)
        if (ch == ',') ch = ' ';
      std::istringstream nums(value);
      std::size_t count = 0;
      std::string tok;
      while (nums >> tok) {
        if (count >= 27)
          throw DomainError(fmt::format("algebra file line {}: more than 27 constants", lineno));
        try {
          std::size_t used = 0;
          alg.c[count] = std::stod(tok, &used);
          if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
          throw DomainError(fmt::format("algebra file line {}: bad number '{}'", lineno, tok));
        }
        ++count;
      }
      if (count != 27)
        throw DomainError(
            fmt::format("algebra file line {}: expected 27 constants, got {}", lineno, count));
      have_c = true;
    } else {
      throw DomainError(fmt::format("algebra file line {}: unknown key '{}'", lineno, key));
    }
  }
  if (!have_label) throw DomainError("algebra file: missing key 'label'");
  if (!have_c) throw DomainError("algebra file: missing key 'c'");
  return alg;
}

LieAlgebra3 load_algebra(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError(fmt::format("cannot open algebra file '{}'", path));
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_algebra(buf.str());
}

std::string format_algebra(const LieAlgebra3& alg) {
  std::string out = fmt::format("label = {}\nc =", alg.label);
  for (double v : alg.c) out += fmt::format(" {:.17g}", v);
  out += '\n';
  return out;
}

// ---------------------------------------------------------------------------

Vec finite_difference_gradient(const std::function<double(const Vec&)>& f, const Vec& x) {
  static const double base = std::cbrt(std::numeric_limits<double>::epsilon());
  Vec g(x.size());
  Vec probe = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double h = base * std::max(1.0, std::abs(x[j]));
    probe[j] = x[j] + h;
    const double fp = f(probe);
    probe[j] = x[j] - h;
    const double fm = f(probe);
    probe[j] = x[j];
    g[j] = (fp - fm) / (2.0 * h);
  }
  return g;
}

Observable::Observable(ValueFn value, GradientFn gradient, std::string name)
    : value_(std::move(value)), gradient_(std::move(gradient)), name_(std::move(name)) {}

Vec Observable::gradient(const Vec& x) const {
  if (gradient_) return gradient_(x);
  return finite_difference_gradient(value_, x);
}

Observable Observable::named(std::string name) const {
  Observable copy = *this;
  copy.name_ = std::move(name);
  return copy;
}

Observable coordinate(int dim, int j) {
  if (j < 0 || j >= dim) throw DomainError(fmt::format("coordinate index {} out of range", j));
  return Observable([j](const Vec& x) { return x[j]; },
                    [dim, j](const Vec&) {
                      Vec g = Vec::Zero(dim);
                      g[j] = 1.0;
                      return g;
                    },
                    fmt::format("x{}", j + 1));
}

Observable quadratic_form(const Mat& q, const Vec& b, double c, std::string name) {
  if (q.rows() != q.cols() || (b.size() != 0 && b.size() != q.rows()))
    throw DomainError("quadratic_form: inconsistent dimensions");
  const Mat qs = 0.5 * (q + q.transpose());
  const Vec bb = b.size() == 0 ? Vec::Zero(q.rows()) : b;
  return Observable([qs, bb, c](const Vec& x) { return 0.5 * x.dot(qs * x) + bb.dot(x) + c; },
                    [qs, bb](const Vec& x) -> Vec { return qs * x + bb; }, std::move(name));
}

Observable half_norm_squared(int dim) {
  return quadratic_form(Mat::Identity(dim, dim), Vec::Zero(dim), 0.0, "H2");
}

Observable euler_kinetic_energy(const Vec3& inertia) {
  Mat q = Mat::Zero(3, 3);
  for (int k = 0; k < 3; ++k) {
    if (!(inertia[k] > 0.0)) throw DomainError("moments of inertia must be positive");
    q(k, k) = 1.0 / inertia[k];
  }
  return quadratic_form(q, Vec::Zero(3), 0.0, "H1");
}

Observable nambu_observable(const Observable& a, const Observable& b, const Observable& c) {
  return Observable([a, b, c](const Vec& x) {
    return nambu_bracket(a.gradient(x), b.gradient(x), c.gradient(x));
  });
}

Polynomial& Polynomial::add(double coefficient, std::vector<int> exponents) {
  if (static_cast<int>(exponents.size()) != dim_)
    throw DomainError("Polynomial::add: exponent vector has wrong length");
  terms_.push_back({coefficient, std::move(exponents)});
  return *this;
}

double Polynomial::value(const Vec& x) const {
  double s = 0.0;
  for (const auto& t : terms_) {
    double m = t.coefficient;
    for (int j = 0; j < dim_; ++j) m *= std::pow(x[j], t.exponents[j]);
    s += m;
  }
  return s;
}

Vec Polynomial::gradient(const Vec& x) const {
  Vec g = Vec::Zero(dim_);
  for (const auto& t : terms_) {
    for (int d = 0; d < dim_; ++d) {
      if (t.exponents[d] == 0) continue;
      double m = t.coefficient * t.exponents[d];
      for (int j = 0; j < dim_; ++j) m *= std::pow(x[j], j == d ? t.exponents[j] - 1 : t.exponents[j]);
      g[d] += m;
    }
  }
  return g;
}

Observable Polynomial::observable(std::string name) const {
  auto self = std::make_shared<Polynomial>(*this);
  return Observable([self](const Vec& x) { return self->value(x); },
                    [self](const Vec& x) { return self->gradient(x); }, std::move(name));
}

Polynomial random_polynomial(int dim, int degree, std::mt19937_64& rng) {
  std::normal_distribution<double> coef(0.0, 1.0);
  Polynomial p(dim);
  std::vector<int> e(dim, 0);
  // odometer over exponent vectors with each entry <= degree
  while (true) {
    int total = 0;
    for (int v : e) total += v;
    if (total >= 1 && total <= degree) p.add(coef(rng), e);
    int pos = 0;
    while (pos < dim && ++e[pos] > degree) e[pos++] = 0;
    if (pos == dim) break;
  }
  return p;
}

Vec random_point(int dim, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> n(0.0, scale);
  Vec x(dim);
  for (int j = 0; j < dim; ++j) x[j] = n(rng);
  return x;
}

double gradient_self_test(const Observable& obs, int dim, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Vec x = random_point(dim, rng);
    const Vec g = obs.gradient(x);
    const Vec fd = finite_difference_gradient([&](const Vec& y) { return obs(y); }, x);
    worst = std::max(worst, (g - fd).norm() / std::max(1.0, g.norm()));
  }
  return worst;
}

// ---------------------------------------------------------------------------

PoissonSystem lie_poisson_system(const LieAlgebra3& alg, std::vector<Observable> casimirs) {
  PoissonSystem sys;
  sys.dim = 3;
  sys.label = alg.label;
  sys.casimirs = std::move(casimirs);
  sys.poisson_matrix = [alg](const Vec& xi) -> Mat {
    return lie_poisson_matrix(alg, Vec3(xi[0], xi[1], xi[2]));
  };
  return sys;
}

PoissonSystem so3_system() { return lie_poisson_system(so3(), {half_norm_squared(3)}); }

PoissonSystem heisenberg_system() {
  return lie_poisson_system(heisenberg(), {coordinate(3, 0).named("r")});
}

PoissonSystem canonical_system(int n) {
  if (n < 1) throw DomainError("canonical_system: n must be positive");
  PoissonSystem sys;
  sys.dim = 2 * n;
  sys.label = fmt::format("canonical-{}", 2 * n);
  Mat jc = Mat::Zero(2 * n, 2 * n);
  jc.topRightCorner(n, n) = Mat::Identity(n, n);
  jc.bottomLeftCorner(n, n) = -Mat::Identity(n, n);
  sys.poisson_matrix = [jc](const Vec&) { return jc; };
  return sys;
}

double poisson_bracket(const PoissonSystem& sys, const Observable& g, const Observable& h,
                       const Vec& xi) {
  if (xi.size() != sys.dim)
    throw DomainError(fmt::format("poisson_bracket: point has dimension {}, system has {}",
                                  xi.size(), sys.dim));
  const Vec dg = g.gradient(xi);
  const Vec dh = h.gradient(xi);
  if (dg.size() != sys.dim || dh.size() != sys.dim)
    throw DomainError("poisson_bracket: gradient dimension mismatch");
  return dg.dot(sys.J(xi) * dh);
}

double fundamental_identity_residual(const Observable& a, const Observable& b, const Observable& c,
                                     const Observable& h1, const Observable& h2, const Vec3& xi) {
  const Vec x = xi;
  auto bracket = [&](const Observable& f, const Observable& g, const Observable& h) {
    return nambu_bracket(f.gradient(x), g.gradient(x), h.gradient(x));
  };
  const Observable abc = nambu_observable(a, b, c);
  const Observable ah = nambu_observable(a, h1, h2);
  const Observable bh = nambu_observable(b, h1, h2);
  const Observable ch = nambu_observable(c, h1, h2);
  const double lhs = bracket(abc, h1, h2);
  const double rhs = bracket(ah, b, c) + bracket(a, bh, c) + bracket(a, b, ch);
  return std::abs(lhs - rhs);
}

double casimir_check(const PoissonSystem& sys, const Observable& casimir, int samples,
                     std::uint64_t seed) {
  if (samples < 1) throw DomainError("casimir_check: samples must be >= 1");
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Vec xi = random_point(sys.dim, rng);
    const double r = (sys.J(xi) * casimir.gradient(xi)).norm() / (1.0 + xi.squaredNorm());
    worst = std::max(worst, r);
  }
  return worst;
}

double poisson_antisymmetry_residual(const PoissonSystem& sys, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Mat j = sys.J(random_point(sys.dim, rng));
    worst = std::max(worst, (j + j.transpose()).cwiseAbs().maxCoeff());
  }
  return worst;
}

Vec3 euler_top_rhs(const Vec3& xi, const Vec3& inertia) {
  for (int k = 0; k < 3; ++k)
    if (!(inertia[k] > 0.0))
      throw DomainError(fmt::format("euler_top_rhs: moment I{} = {} is not positive", k + 1,
                                    inertia[k]));
  return xi.cwiseQuotient(inertia).cross(xi);
}

}  // namespace nambu
