#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "ncp/convolutions.hpp"
#include "ncp/errors.hpp"
#include "ncp/measure.hpp"
#include "ncp/transforms.hpp"

#ifdef __SIZEOF_FLOAT128__
#include <quadmath.h>
#endif

namespace ncp {

// (m, gamma, sigma) for the four infinitely divisible families.
struct LevyTriple {
  double m = 1.0;
  double gamma = 0.0;
  FiniteAtomicMeasure sigma = FiniteAtomicMeasure::zero();

  LevyTriple() = default;
  LevyTriple(double m, double gamma, FiniteAtomicMeasure sigma);
};

namespace detail {

inline double log_real(double x) { return std::log(x); }
#ifdef __SIZEOF_FLOAT128__
inline __float128 log_real(__float128 x) { return logq(x); }
#endif

}  // namespace detail

// Phi(z) = -gamma - log(m) z + sum_j s_j (1 + p_j z)/(p_j - z)
template <typename Real>
std::complex<Real> phi_eval(const LevyTriple& T, std::complex<Real> z) {
  using C = std::complex<Real>;
  C acc = C(Real(-T.gamma)) - detail::log_real(Real(T.m)) * z;
  for (const auto& a : T.sigma.atoms()) {
    const Real p = a.position;
    acc += Real(a.weight) * (Real(1) + p * z) / (C(p) - z);
  }
  return acc;
}

// Phi'(z) = -log(m) + sum_j s_j (1 + p_j^2)/(p_j - z)^2
cplx phi_derivative(const LevyTriple& T, cplx z);

// Measure with F = z/m - gamma + sum s_j (1 + p_j z)/(p_j - z).
FiniteAtomicMeasure boolean_idiv(const LevyTriple& T);

// E of the Boolean family member with the same (gamma, sigma), m = 1.
cplx boolean_e_at(const LevyTriple& T, cplx z);

// phi(w) = gamma + sum s_j (1 + p_j w)/(w - p_j)
cplx free_phi_at(const LevyTriple& T, cplx w);

// F(z) = w where w + phi(w) = z and Im w >= Im z. Requires m = 1.
cplx free_idiv_at(const LevyTriple& T, cplx z);
TransformGrid free_idiv(const LevyTriple& T, const ComplexVector& points = canonical_grid());

// t -> exp(i gamma t + sum_j s_j g(t, p_j)),
// g(t, x) = (e^{itx} - 1 - itx/(1+x^2)) (1+x^2)/x^2, g(t, 0) = -t^2/2.
// Requires m = 1.
CharacteristicFunction classical_idiv_cf(const LevyTriple& T);

// ---- Monotone flow ---------------------------------------------------------

inline constexpr double kDefaultFlowStep = 1e-3;
inline constexpr double kMaxFlowStep = 1e-2;

template <typename Real>
struct FlowTrace {
  std::complex<Real> value;
  std::vector<cplx> path;  // RK4 nodes, only when requested
};

namespace detail {

template <typename Real>
std::complex<Real> rk4_step(const LevyTriple& T, std::complex<Real> w, Real h, int depth) {
  using C = std::complex<Real>;
  const C k1 = phi_eval<Real>(T, w);
  const cplx w_d(static_cast<double>(w.real()), static_cast<double>(w.imag()));
  const cplx k1_d(static_cast<double>(k1.real()), static_cast<double>(k1.imag()));
  // Split only when one step would move a large fraction of Im w; on Z_R and
  // the default step this never triggers.
  if (depth < 30 && static_cast<double>(h) * std::abs(k1_d) > 0.05 * w_d.imag()) {
    const C mid = rk4_step<Real>(T, w, h / Real(2), depth + 1);
    return rk4_step<Real>(T, mid, h / Real(2), depth + 1);
  }
  const Real half = h / Real(2);
  const C k2 = phi_eval<Real>(T, w + half * k1);
  const C k3 = phi_eval<Real>(T, w + half * k2);
  const C k4 = phi_eval<Real>(T, w + h * k3);
  return w + h / Real(6) * (k1 + Real(2) * k2 + Real(2) * k3 + k4);
}

inline int flow_steps(double duration, double step) {
  if (!(step > 0.0) || step > kMaxFlowStep)
    throw ValidationError("flow step must lie in (0, 1e-2]");
  if (duration < 0.0) throw ValidationError("flow duration must be non-negative");
  return static_cast<int>(std::ceil(duration / step - 1e-9));
}

}  // namespace detail

// Integrates dw/dt = Phi(w) from w(0) = w0 over `duration` with RK4, using
// ceil(duration/step) equal steps. Checks Im w(t) >= m^{-t} Im w0 at every
// node and throws NumericalError on violation.
template <typename Real>
FlowTrace<Real> flow_from(const LevyTriple& T, std::complex<Real> w0, double duration,
                          double step, bool keep_path = false) {
  const int n = detail::flow_steps(duration, step);
  FlowTrace<Real> out{w0, {}};
  const double im0 = static_cast<double>(w0.imag());
  if (keep_path) out.path.emplace_back(static_cast<double>(w0.real()), im0);
  if (n == 0) return out;
  const Real h = Real(duration) / Real(n);
  const double log_m = std::log(T.m);
  for (int j = 1; j <= n; ++j) {
    out.value = detail::rk4_step<Real>(T, out.value, h, 0);
    const double t = duration * j / n;
    const double im = static_cast<double>(out.value.imag());
    const double floor = std::exp(-log_m * t) * im0;
    if (!std::isfinite(im) || im < floor * (1.0 - 1e-9) - 1e-12)
      throw NumericalError("monotone flow: Im F_t(z) fell below m^-t Im z");
    if (keep_path) out.path.emplace_back(static_cast<double>(out.value.real()), im);
  }
  return out;
}

template <typename Real>
std::complex<Real> flow_at(const LevyTriple& T, std::complex<Real> z, double t,
                           double step = kDefaultFlowStep) {
  return flow_from<Real>(T, z, t, step).value;
}

struct FlowResult {
  std::vector<double> times;
  std::vector<TransformGrid> maps;  // F-kind grids, one per time
  double step_size = kDefaultFlowStep;
};

// F_t on `points` for t in {0, t_end/2, t_end}; the second half restarts from
// the half-time values.
FlowResult monotone_idiv_flow(const LevyTriple& T, double t_end,
                              double step = kDefaultFlowStep,
                              const ComplexVector& points = canonical_grid());

struct FlowDistance {
  double epsilon;   // max over C of |Phi_1 - Phi_2|
  double m1;        // max over C of |Phi_2'|
  double bound;     // (e^{M1} - 1)/M1 * epsilon
  double observed;  // max over K of |F_1(z,1) - F_2(z,1)|
  bool passes;      // observed <= 2 bound
};

// C is the rectangle spanned by both trajectories from every point of K,
// sampled on a 40x40 lattice together with the trajectory nodes.
FlowDistance flow_distance_bound(const LevyTriple& T1, const LevyTriple& T2,
                                 const ComplexVector& K = canonical_grid(),
                                 double step = kDefaultFlowStep);

}  // namespace ncp
