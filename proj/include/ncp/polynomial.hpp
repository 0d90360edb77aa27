#pragma once

#include <complex>
#include <initializer_list>
#include <vector>

namespace ncp {

// Real-coefficient polynomial, coefficients in ascending degree. The leading
// coefficient is kept non-zero; the zero polynomial has no coefficients and
// degree 0.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coefficients);
  Polynomial(std::initializer_list<double> coefficients);

  static Polynomial constant(double c) { return Polynomial({c}); }
  static Polynomial monomial(int degree, double c = 1.0);
  // (z - r)
  static Polynomial linear_root(double r) { return Polynomial({-r, 1.0}); }
  // prod_j (z - r_j)
  static Polynomial from_roots(const std::vector<double>& roots);

  const std::vector<double>& coefficients() const { return c_; }
  int degree() const { return c_.empty() ? 0 : static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  double leading() const { return c_.empty() ? 0.0 : c_.back(); }
  double operator[](int k) const {
    return k < static_cast<int>(c_.size()) ? c_[k] : 0.0;
  }

  template <typename T>
  T operator()(const T& z) const {
    T acc{};
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + T(*it);
    return acc;
  }

  Polynomial derivative() const;
  // Scale so the leading coefficient is 1.
  Polynomial monic() const;

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(double s);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);

  bool operator==(const Polynomial&) const = default;

 private:
  void trim();
  std::vector<double> c_;
};

struct DivisionResult {
  Polynomial quotient;
  Polynomial remainder;
};

DivisionResult divide(const Polynomial& num, const Polynomial& den);

// Divides out a known root r by synthetic division; the remainder is dropped.
Polynomial deflate(const Polynomial& p, double r);

Polynomial power(const Polynomial& p, int k);

struct RealRoot {
  double root;
  int multiplicity;
};

// Imaginary-part threshold below which a root is classified real.
inline constexpr double kRealRootImagThreshold = 1e-8;

// All real roots, found as companion-matrix eigenvalues (Eigen) with a Newton
// polish on the simple ones. Nearly coincident eigenvalues are clustered and
// reported once with their multiplicity. Throws ValidationError for degree 0.
std::vector<RealRoot> real_roots(const Polynomial& p);

// All complex roots (eigenvalues of the companion matrix, polished).
std::vector<std::complex<double>> complex_roots(const Polynomial& p);

}  // namespace ncp
