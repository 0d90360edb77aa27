#pragma once

#include <functional>
#include <vector>

#include "ncp/measure.hpp"
#include "ncp/rational.hpp"
#include "ncp/transforms.hpp"

namespace ncp {

// t -> integral e^{itx} dmu(x)
using CharacteristicFunction = std::function<cplx(double)>;

// Atoms at x_i + y_j with weights w_i v_j.
FiniteAtomicMeasure classical_convolve(const FiniteAtomicMeasure& mu,
                                       const FiniteAtomicMeasure& nu);

// E-transforms add, masses multiply.
FiniteAtomicMeasure boolean_convolve(const FiniteAtomicMeasure& mu,
                                     const FiniteAtomicMeasure& nu);

// F_{mu |> nu} = F_mu o F_nu. Throws DegreeCapExceeded past `degree_cap`.
FiniteAtomicMeasure monotone_convolve(const FiniteAtomicMeasure& mu,
                                      const FiniteAtomicMeasure& nu,
                                      int degree_cap = kDefaultDegreeCap);

struct SubordinationOptions {
  int max_iterations = 500;
  double tolerance = 1e-13;
  // |F_mu(omega_1) - F_nu(omega_2)| allowed between the two sides.
  double cross_check = 1e-10;
};

// F_{mu [+] nu}(z) by the subordination fixed point
//   omega = z + h_mu(z + h_nu(omega)),  h = F - id,
// returning F_mu(z + h_nu(omega)) after checking it against F_nu(omega).
// Both measures must be probability measures.
cplx free_convolve_at(const RationalMap& F_mu, const RationalMap& F_nu, cplx z,
                      SubordinationOptions opt = {});

// Values of F_{mu [+] nu} on `points` (Z_R by default).
TransformGrid free_convolve(const FiniteAtomicMeasure& mu, const FiniteAtomicMeasure& nu,
                            const ComplexVector& points = canonical_grid(),
                            SubordinationOptions opt = {});

// k-fold Boolean power: F = z/m^k - k E_mu. Exact for every k.
FiniteAtomicMeasure boolean_power(const FiniteAtomicMeasure& mu, int k);

// F^{ok}(z) by k successive evaluations. Throws NumericalError if Im decreases
// or |w| passes 1e12.
cplx monotone_power_at(const RationalMap& F, int k, cplx z);

TransformGrid monotone_power_grid(const FiniteAtomicMeasure& mu, int k,
                                  const ComplexVector& points = canonical_grid());

// F_{mu^{[+]k}}(z) = F_mu(u) with k u - (k-1) F_mu(u) = z, Im u >= Im z.
cplx free_power_at(const RationalMap& F, int k, cplx z);

TransformGrid free_power_grid(const FiniteAtomicMeasure& mu, int k,
                              const ComplexVector& points = canonical_grid());

// t -> (sum_j w_j e^{i t x_j})^k
CharacteristicFunction classical_power_cf(const FiniteAtomicMeasure& mu, int k);

CharacteristicFunction characteristic_function(const FiniteAtomicMeasure& mu);

struct FftOptions {
  int samples = 1 << 14;
  double t_max = 64.0;
};

// Density on x_j = (j - N/2) pi / T by FFT of the cf over [-T, T).
std::vector<DensitySample> cf_density(const CharacteristicFunction& cf, FftOptions opt = {});

}  // namespace ncp
