#include "ncp/polynomial.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "ncp/errors.hpp"

namespace ncp {
namespace {

using cplx = std::complex<double>;

// Coefficients below this fraction of the largest one are treated as
// cancellation residue when they sit at the top of the polynomial.
constexpr double kTrimRelative = 1e-14;

// Eigenvalues of a multiple root split by roughly eps^(1/m); cluster radius
// relative to max(1, |root|).
constexpr double kClusterRadius = 1e-6;

cplx newton_polish(const Polynomial& p, const Polynomial& dp, cplx z) {
  for (int it = 0; it < 4; ++it) {
    const cplx d = dp(z);
    if (std::abs(d) == 0.0) break;
    const cplx step = p(z) / d;
    const cplx next = z - step;
    if (!(std::abs(p(next)) < std::abs(p(z)))) break;
    z = next;
    if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(z))) break;
  }
  return z;
}

}  // namespace

Polynomial::Polynomial(std::vector<double> coefficients) : c_(std::move(coefficients)) {
  trim();
}

Polynomial::Polynomial(std::initializer_list<double> coefficients)
    : c_(coefficients) {
  trim();
}

Polynomial Polynomial::monomial(int degree, double c) {
  std::vector<double> v(degree + 1, 0.0);
  v[degree] = c;
  return Polynomial(std::move(v));
}

Polynomial Polynomial::from_roots(const std::vector<double>& roots) {
  Polynomial p({1.0});
  for (double r : roots) p = p * linear_root(r);
  return p;
}

void Polynomial::trim() {
  double scale = 0.0;
  for (double v : c_) scale = std::max(scale, std::abs(v));
  while (!c_.empty() && std::abs(c_.back()) <= kTrimRelative * scale) c_.pop_back();
}

Polynomial Polynomial::derivative() const {
  if (c_.size() <= 1) return Polynomial();
  std::vector<double> d(c_.size() - 1);
  for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = k * c_[k];
  return Polynomial(std::move(d));
}

Polynomial Polynomial::monic() const {
  if (c_.empty()) throw ValidationError("zero polynomial has no monic form");
  return *this * (1.0 / c_.back());
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0.0);
  for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
  trim();
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0.0);
  for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] -= o.c_[k];
  trim();
  return *this;
}

Polynomial& Polynomial::operator*=(double s) {
  for (double& v : c_) v *= s;
  trim();
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero() || b.is_zero()) return Polynomial();
  std::vector<double> out(a.c_.size() + b.c_.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.c_.size(); ++i)
    for (std::size_t j = 0; j < b.c_.size(); ++j) out[i + j] += a.c_[i] * b.c_[j];
  return Polynomial(std::move(out));
}

DivisionResult divide(const Polynomial& num, const Polynomial& den) {
  if (den.is_zero()) throw ValidationError("division by the zero polynomial");
  const int dn = num.degree();
  const int dd = den.degree();
  if (num.is_zero() || dn < dd) return {Polynomial(), num};
  std::vector<double> rem = num.coefficients();
  std::vector<double> quo(dn - dd + 1, 0.0);
  const double lead = den.leading();
  for (int k = dn - dd; k >= 0; --k) {
    const double q = rem[k + dd] / lead;
    quo[k] = q;
    for (int j = 0; j <= dd; ++j) rem[k + j] -= q * den[j];
    rem[k + dd] = 0.0;
  }
  rem.resize(dd);
  return {Polynomial(std::move(quo)), Polynomial(std::move(rem))};
}

Polynomial deflate(const Polynomial& p, double r) {
  const auto& c = p.coefficients();
  if (c.size() <= 1) return p;
  std::vector<double> q(c.size() - 1);
  double acc = c.back();
  for (std::size_t k = c.size() - 1; k-- > 0;) {
    q[k] = acc;
    acc = c[k] + acc * r;
  }
  return Polynomial(std::move(q));
}

Polynomial power(const Polynomial& p, int k) {
  Polynomial out({1.0});
  for (int i = 0; i < k; ++i) out = out * p;
  return out;
}

std::vector<cplx> complex_roots(const Polynomial& p) {
  const int n = p.degree();
  if (p.is_zero() || n < 1)
    throw ValidationError("root finding needs a polynomial of degree >= 1");
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
  const double lead = p.leading();
  for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) companion(i, n - 1) = -p[i] / lead;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  if (solver.info() != Eigen::Success)
    throw NumericalError("companion eigenvalue iteration failed");
  const Polynomial dp = p.derivative();
  std::vector<cplx> roots;
  roots.reserve(n);
  for (int i = 0; i < n; ++i) roots.push_back(newton_polish(p, dp, solver.eigenvalues()[i]));
  return roots;
}

std::vector<RealRoot> real_roots(const Polynomial& p) {
  const int n = p.degree();
  if (p.is_zero() || n < 1)
    throw ValidationError("real_roots needs a polynomial of degree >= 1");

  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
  const double lead = p.leading();
  for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) companion(i, n - 1) = -p[i] / lead;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  if (solver.info() != Eigen::Success)
    throw NumericalError("companion eigenvalue iteration failed");

  std::vector<cplx> eig(solver.eigenvalues().begin(), solver.eigenvalues().end());
  std::sort(eig.begin(), eig.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });

  // Greedy clustering of nearby eigenvalues.
  std::vector<std::vector<cplx>> clusters;
  std::vector<bool> used(eig.size(), false);
  for (std::size_t i = 0; i < eig.size(); ++i) {
    if (used[i]) continue;
    std::vector<cplx> cl{eig[i]};
    used[i] = true;
    const double radius = kClusterRadius * std::max(1.0, std::abs(eig[i]));
    for (std::size_t j = i + 1; j < eig.size(); ++j)
      if (!used[j] && std::abs(eig[j] - eig[i]) <= radius) {
        cl.push_back(eig[j]);
        used[j] = true;
      }
    clusters.push_back(std::move(cl));
  }

  const Polynomial dp = p.derivative();
  std::vector<RealRoot> out;
  for (const auto& cl : clusters) {
    cplx centre{};
    for (cplx z : cl) centre += z;
    centre /= static_cast<double>(cl.size());
    if (cl.size() == 1) centre = newton_polish(p, dp, centre);
    if (std::abs(centre.imag()) < kRealRootImagThreshold)
      out.push_back({centre.real(), static_cast<int>(cl.size())});
  }
  std::sort(out.begin(), out.end(),
            [](const RealRoot& a, const RealRoot& b) { return a.root < b.root; });
  return out;
}

}  // namespace ncp
