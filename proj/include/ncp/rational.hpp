#pragma once

#include <complex>
#include <vector>

#include "ncp/polynomial.hpp"

namespace ncp {

inline constexpr int kDefaultDegreeCap = 64;
// Common real roots closer than this (relative to max(1,|r|)) are cancelled.
inline constexpr double kCoprimeTolerance = 1e-9;

// numerator / denominator, kept coprime (over common real roots) with a monic
// denominator. This is the exact carrier for F, G and E transforms of atomic
// measures.
class RationalMap {
 public:
  RationalMap(Polynomial numerator, Polynomial denominator);
  explicit RationalMap(Polynomial p) : RationalMap(std::move(p), Polynomial({1.0})) {}

  static RationalMap identity() { return RationalMap(Polynomial({0.0, 1.0})); }

  const Polynomial& numerator() const { return num_; }
  const Polynomial& denominator() const { return den_; }
  // max(deg num, deg den)
  int degree() const { return std::max(num_.degree(), den_.degree()); }

  template <typename T>
  T operator()(const T& z) const {
    return num_(z) / den_(z);
  }

  // First derivative evaluated at z.
  std::complex<double> derivative_at(std::complex<double> z) const;

  RationalMap reciprocal() const;

  friend RationalMap operator+(const RationalMap& a, const RationalMap& b);
  friend RationalMap operator-(const RationalMap& a, const RationalMap& b);
  friend RationalMap operator*(double s, const RationalMap& a);

 private:
  Polynomial num_;
  Polynomial den_;
};

// f o g. Throws DegreeCapExceeded when the composed degree would exceed cap.
RationalMap compose(const RationalMap& f, const RationalMap& g,
                    int degree_cap = kDefaultDegreeCap);

struct Pole {
  double location;
  double residue;
};

// f(z) = slope z + intercept + sum_j residue_j / (z - location_j).
struct PartialFractions {
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<Pole> poles;

  std::complex<double> operator()(std::complex<double> z) const;
};

// Requires deg num <= deg den + 1 and only real simple poles; otherwise throws
// ValidationError.
PartialFractions partial_fractions(const RationalMap& f);

}  // namespace ncp
