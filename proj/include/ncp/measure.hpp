#pragma once

#include <complex>
#include <span>
#include <vector>

namespace ncp {

using cplx = std::complex<double>;

// State measures carry probability mass (at most one on the line, exactly
// one on the circle). Parameter measures are the sigma of Levy-type
// representations and may have any finite mass, including zero.
enum class Role { state, parameter };

struct Atom {
  double position;
  double weight;

  bool operator==(const Atom&) const = default;
};

// Positions closer than this are merged at construction.
inline constexpr double kAtomMergeTolerance = 1e-12;

// Finite positive measure on the real line with finitely many atoms.
// Atoms are kept sorted by position, merged, and strictly positive.
class FiniteAtomicMeasure {
 public:
  FiniteAtomicMeasure(std::vector<Atom> atoms, Role role = Role::state);

  static FiniteAtomicMeasure dirac(double position, double weight = 1.0,
                                   Role role = Role::state);
  // The zero parameter measure (sigma = 0).
  static FiniteAtomicMeasure zero();

  const std::vector<Atom>& atoms() const { return atoms_; }
  Role role() const { return role_; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }

  std::vector<double> positions() const;
  std::vector<double> weights() const;

  // Integral of f against the measure.
  template <typename F>
  auto integrate(F&& f) const {
    decltype(f(0.0) * 1.0) acc{};
    for (const auto& a : atoms_) acc += a.weight * f(a.position);
    return acc;
  }

  bool operator==(const FiniteAtomicMeasure&) const = default;

 private:
  std::vector<Atom> atoms_;
  Role role_;
};

double mass(const FiniteAtomicMeasure& mu);
double first_moment(const FiniteAtomicMeasure& mu);
double second_moment(const FiniteAtomicMeasure& mu);

// mu(x^2) mu(R) - mu(x)^2: the variance of a non-normalized measure.
double generalized_variance(const FiniteAtomicMeasure& mu);

// Pushforward under x -> s x. Throws ValidationError for s == 0.
FiniteAtomicMeasure dilate(const FiniteAtomicMeasure& mu, double s);
// Pushforward under x -> x + a.
FiniteAtomicMeasure translate(const FiniteAtomicMeasure& mu, double a);
// Multiplies every weight by c > 0.
FiniteAtomicMeasure scale_mass(const FiniteAtomicMeasure& mu, double c);

// Atoms on the unit circle, stored by angle in [0, 2 pi).
struct CircleAtom {
  double angle;
  double weight;

  cplx point() const { return std::polar(1.0, angle); }
  bool operator==(const CircleAtom&) const = default;
};

class CircleMeasure {
 public:
  CircleMeasure(std::vector<CircleAtom> atoms, Role role = Role::state);

  static CircleMeasure dirac(double angle, double weight = 1.0,
                             Role role = Role::state);
  static CircleMeasure zero();
  // n equal atoms at the n-th roots of unity.
  static CircleMeasure roots_of_unity(int n);

  const std::vector<CircleAtom>& atoms() const { return atoms_; }
  Role role() const { return role_; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }

  template <typename F>
  auto integrate(F&& f) const {
    decltype(f(cplx{}) * 1.0) acc{};
    for (const auto& a : atoms_) acc += a.weight * f(a.point());
    return acc;
  }

  bool operator==(const CircleMeasure&) const = default;

 private:
  std::vector<CircleAtom> atoms_;
  Role role_;
};

double mass(const CircleMeasure& mu);

// Sum_j w_j e^{i p theta_j}, the p-th Taylor coefficient of psi_mu.
cplx circle_moment(const CircleMeasure& mu, int p);

}  // namespace ncp
