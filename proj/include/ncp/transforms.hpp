#pragma once

#include <Eigen/Core>
#include <complex>
#include <functional>
#include <vector>

#include "ncp/measure.hpp"
#include "ncp/rational.hpp"

namespace ncp {

using ComplexVector = Eigen::VectorXcd;
using ComplexFunction = std::function<cplx(cplx)>;

enum class TransformKind { G, F, E };

// Default lower bound on Im of transform grid points.
inline constexpr double kGridImagFloor = 0.25;

// Values of a half-plane transform sampled on a fixed set of points. `mass`
// is the total mass of the underlying measure; it is needed to move between
// the G/F/E forms and enters the weak-convergence metric.
struct TransformGrid {
  ComplexVector points;
  ComplexVector values;
  TransformKind kind = TransformKind::G;
  double mass = 1.0;

  // Cauchy transform values on `points`.
  ComplexVector cauchy() const;
  // F-transform values on `points`.
  ComplexVector reciprocal_cauchy() const;
};

// Builds a grid by evaluating `f` at every point. Throws ValidationError if
// a point lies below `imag_floor` or a value is not finite.
TransformGrid sample_transform(const ComplexFunction& f, const ComplexVector& points,
                               TransformKind kind, double mass,
                               double imag_floor = kGridImagFloor);

// Z_R = {x + iy : x in {-3,-1.5,0,1.5,3}, y in {1,2}}, ordered y-major.
const ComplexVector& canonical_grid();

// ---- Cauchy / F / E / phi ------------------------------------------------

// G_mu(z) = sum_j w_j / (z - x_j). Throws ValidationError for Im z <= 0.
cplx cauchy_G(const FiniteAtomicMeasure& mu, cplx z);

// G_mu as an exact rational map.
RationalMap cauchy_rational(const FiniteAtomicMeasure& mu);
// F_mu = 1 / G_mu.
RationalMap f_transform(const FiniteAtomicMeasure& mu);
// E_mu(z) = z / mu(R) - F_mu(z).
RationalMap e_transform(const FiniteAtomicMeasure& mu);

// Voiculescu transform phi_mu(z) = F_mu^{-1}(z) - z for a probability measure.
// The inverse is found by Newton iteration from w = z; the intended domain is
// a Stolz angle with Im z >= 10 (1 + width(supp mu)). Throws NumericalError
// when Newton fails to converge to the branch with Im w <= Im z.
cplx voiculescu_phi(const FiniteAtomicMeasure& mu, cplx z);

// ---- Nevanlinna data -------------------------------------------------------

// F(z) = z/m - gamma + integral (1 + x z)/(x - z) dsigma(x)
struct NevanlinnaData {
  double m = 1.0;
  double gamma = 0.0;
  FiniteAtomicMeasure sigma = FiniteAtomicMeasure::zero();

  cplx operator()(cplx z) const;
};

// integral (1 + x z)/(x - z) dsigma(x)
cplx nevanlinna_integral(const FiniteAtomicMeasure& sigma, cplx z);

// Decomposes an F-transform of a mass-m measure. Throws ValidationError for a
// positive residue (not an F-transform) or non-real/multiple poles.
NevanlinnaData nevanlinna_decompose(const RationalMap& F, double m);

// Exact rational form of z/m - gamma + integral (1+xz)/(x-z) dsigma.
RationalMap nevanlinna_synthesize(const NevanlinnaData& data);

// Atoms at the poles of G = 1/F, weights equal to the residues. Throws
// ValidationError for a complex or multiple pole or a non-positive residue.
FiniteAtomicMeasure recover_measure(const RationalMap& F);

// ---- Stieltjes inversion ---------------------------------------------------

struct Interval {
  double lo;
  double hi;
};

struct DensitySample {
  double x;
  double density;
};

struct InversionResult {
  std::vector<DensitySample> density;
  std::vector<Atom> atoms;
};

// A point is an atom when eps |Im G| exceeds this at both eps and 10 eps.
inline constexpr double kAtomThreshold = 0.1;
// and the two weight estimates agree within this relative tolerance.
inline constexpr double kAtomStability = 0.2;

// Samples G on the horizontal line Im z = eps across the window.
TransformGrid sample_line(const ComplexFunction& G, double eps, Interval window,
                          int n_bins, double mass);

// density(x) = -Im G(x + i eps)/pi on n_bins points of the window; atoms are
// located on the 10*eps line, refined on the eps line, and kept when
// eps-stable. Weight estimate: -eps Im G(x* + i eps).
InversionResult stieltjes_invert(const ComplexFunction& G, double eps, Interval window,
                                 int n_bins);

// Grid-only variant: `fine` sampled at Im = eps and `coarse` at Im = 10 eps on
// the same abscissae. Atom positions are limited to the sample abscissae.
InversionResult stieltjes_invert(const TransformGrid& fine, const TransformGrid& coarse);

// ---- Weak-convergence metric -----------------------------------------------

// max over Z_R of |G_a - G_b| plus |mass(a) - mass(b)|.
double weak_distance(const FiniteAtomicMeasure& a, const FiniteAtomicMeasure& b);
double weak_distance(const TransformGrid& a, const TransformGrid& b);
double weak_distance(const FiniteAtomicMeasure& a, const TransformGrid& b);
double weak_distance(const TransformGrid& a, const FiniteAtomicMeasure& b);

// Cauchy transform of mu on Z_R (or on the given points).
TransformGrid cauchy_grid(const FiniteAtomicMeasure& mu);
TransformGrid cauchy_grid(const FiniteAtomicMeasure& mu, const ComplexVector& points);

// ---- Diagnostics -----------------------------------------------------------

struct StolzAngle {
  double alpha;
  double beta;

  StolzAngle(double alpha, double beta);
  bool contains(cplx z) const;
};

struct MaassenCheck {
  double observed_sup;  // sup over samples of |z/m - F_mu(z)|
  double bound;         // |mu(x)|/m^2 + generalized_variance/m^3
  bool passes;
};

// Checks boundedness of z/m - F_mu on C^+_1 against the explicit bound, over
// 100 fixed sample points with Im z >= 1.
MaassenCheck maassen_bound_check(const FiniteAtomicMeasure& mu);

struct TailEstimate {
  double y;
  // k sigma_n(|t| > y) <= 2 k integral (1+t^2)/(t^2+y^2) dsigma_n(t)
  double tail_mass;
  double tail_bound;
  // k Im(F(iy) - iy/m_n) (m^-1 - 1)/(-log m) <= 2 Im(F^{ok}(iy) - iy/m_n^k)
  double tech_left;
  double tech_right;
};

// Both sides of the sigma-tail estimate and of the Stolz-angle comparison at
// z = iy, for the row measure mu_n composed k times. `limit_mass` is the m of
// the limit (factor (m^-1 - 1)/(-log m), equal to 1 at m = 1).
TailEstimate stolz_tail_estimate(const FiniteAtomicMeasure& mu_n, int k, double y,
                                 double limit_mass);

// Ratio (m^-1 - 1)/(-log m), continuously extended by 1 at m = 1.
double mass_ratio_factor(double m);

}  // namespace ncp
