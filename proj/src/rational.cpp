#include "ncp/rational.hpp"

#include <cmath>
#include <string>

#include "ncp/errors.hpp"

namespace ncp {

RationalMap::RationalMap(Polynomial numerator, Polynomial denominator)
    : num_(std::move(numerator)), den_(std::move(denominator)) {
  if (den_.is_zero()) throw ValidationError("rational map with zero denominator");
  if (num_.is_zero()) {
    den_ = Polynomial({1.0});
    return;
  }
  if (num_.degree() >= 1 && den_.degree() >= 1) {
    // Cancel common real roots, one at a time, until none match.
    bool changed = true;
    while (changed && num_.degree() >= 1 && den_.degree() >= 1) {
      changed = false;
      const auto rn = real_roots(num_);
      const auto rd = real_roots(den_);
      for (const auto& a : rn) {
        for (const auto& b : rd) {
          const double tol = kCoprimeTolerance * std::max(1.0, std::abs(a.root));
          if (std::abs(a.root - b.root) <= tol) {
            const double r = 0.5 * (a.root + b.root);
            num_ = deflate(num_, r);
            den_ = deflate(den_, r);
            changed = true;
            break;
          }
        }
        if (changed) break;
      }
    }
  }
  const double lead = den_.leading();
  num_ *= 1.0 / lead;
  den_ *= 1.0 / lead;
}

std::complex<double> RationalMap::derivative_at(std::complex<double> z) const {
  const auto n = num_(z);
  const auto d = den_(z);
  const auto dn = num_.derivative()(z);
  const auto dd = den_.derivative()(z);
  return (dn * d - n * dd) / (d * d);
}

RationalMap RationalMap::reciprocal() const {
  if (num_.is_zero()) throw ValidationError("reciprocal of the zero map");
  return RationalMap(den_, num_);
}

RationalMap operator+(const RationalMap& a, const RationalMap& b) {
  return RationalMap(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

RationalMap operator-(const RationalMap& a, const RationalMap& b) {
  return RationalMap(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
}

RationalMap operator*(double s, const RationalMap& a) {
  return RationalMap(s * a.num_, a.den_);
}

RationalMap compose(const RationalMap& f, const RationalMap& g, int degree_cap) {
  const Polynomial& P = f.numerator();
  const Polynomial& Q = f.denominator();
  const int d = std::max(P.degree(), Q.degree());
  if (d == 0) return f;
  const Polynomial& A = g.numerator();
  const Polynomial& B = g.denominator();
  const int predicted = d * std::max(A.degree(), B.degree());
  if (predicted > degree_cap)
    throw DegreeCapExceeded("composition degree " + std::to_string(predicted) +
                            " exceeds cap " + std::to_string(degree_cap));
  // f(A/B) = sum p_i A^i B^(d-i) / sum q_i A^i B^(d-i)
  std::vector<Polynomial> apow{Polynomial({1.0})}, bpow{Polynomial({1.0})};
  for (int i = 1; i <= d; ++i) {
    apow.push_back(apow.back() * A);
    bpow.push_back(bpow.back() * B);
  }
  Polynomial num, den;
  for (int i = 0; i <= d; ++i) {
    const Polynomial term = apow[i] * bpow[d - i];
    num += P[i] * term;
    den += Q[i] * term;
  }
  return RationalMap(std::move(num), std::move(den));
}

std::complex<double> PartialFractions::operator()(std::complex<double> z) const {
  std::complex<double> acc = slope * z + intercept;
  for (const auto& p : poles) acc += p.residue / (z - p.location);
  return acc;
}

PartialFractions partial_fractions(const RationalMap& f) {
  const Polynomial& num = f.numerator();
  const Polynomial& den = f.denominator();
  if (!num.is_zero() && num.degree() > den.degree() + 1)
    throw ValidationError("partial_fractions: numerator degree exceeds denominator degree + 1");
  PartialFractions out;
  const auto [q, r] = divide(num, den);
  out.slope = q[1];
  out.intercept = q[0];
  if (den.degree() == 0) return out;
  const auto roots = real_roots(den);
  int counted = 0;
  for (const auto& root : roots) {
    if (root.multiplicity != 1)
      throw ValidationError("partial_fractions: multiple pole at " +
                            std::to_string(root.root));
    ++counted;
  }
  if (counted != den.degree())
    throw ValidationError("partial_fractions: denominator has non-real roots");
  const Polynomial dden = den.derivative();
  for (const auto& root : roots)
    out.poles.push_back({root.root, r(root.root) / dden(root.root)});
  return out;
}

}  // namespace ncp
