#include "ncp/idiv.hpp"

#include <algorithm>
#include <cmath>

#include "ncp/newton.hpp"

namespace ncp {
namespace {

void require_unit_mass(const LevyTriple& T, const char* what) {
  if (T.m != 1.0) throw ValidationError(std::string(what) + " requires m = 1");
}

// g(t, x) (1 + x^2)^{-1} x^2 = e^{itx} - 1 - itx/(1+x^2)
cplx levy_integrand(double t, double x) {
  if (std::abs(x) < 1e-6) return {-0.5 * t * t, x * (t - t * t * t / 6.0)};
  const double tx = t * x;
  const double s = std::sin(0.5 * tx);
  const cplx num(-2.0 * s * s, std::sin(tx) - tx / (1.0 + x * x));
  return num * (1.0 + x * x) / (x * x);
}

}  // namespace

LevyTriple::LevyTriple(double m_, double gamma_, FiniteAtomicMeasure sigma_)
    : m(m_), gamma(gamma_), sigma(sigma_.atoms(), Role::parameter) {
  if (!(m > 0.0) || m > 1.0) throw ValidationError("LevyTriple: m must lie in (0, 1]");
  if (!std::isfinite(gamma)) throw ValidationError("LevyTriple: gamma must be finite");
}

cplx phi_derivative(const LevyTriple& T, cplx z) {
  cplx acc = -std::log(T.m);
  for (const auto& a : T.sigma.atoms()) {
    const cplx d = a.position - z;
    acc += a.weight * (1.0 + a.position * a.position) / (d * d);
  }
  return acc;
}

FiniteAtomicMeasure boolean_idiv(const LevyTriple& T) {
  return recover_measure(nevanlinna_synthesize({T.m, T.gamma, T.sigma}));
}

cplx boolean_e_at(const LevyTriple& T, cplx z) {
  return T.gamma - nevanlinna_integral(T.sigma, z);
}

cplx free_phi_at(const LevyTriple& T, cplx w) {
  return T.gamma - nevanlinna_integral(T.sigma, w);
}

cplx free_idiv_at(const LevyTriple& T, cplx z) {
  require_unit_mass(T, "free_idiv");
  auto solve = [&](cplx target, cplx w0) {
    return detail::newton([&](cplx w) { return w + free_phi_at(T, w) - target; },
                          [&](cplx w) {
                            cplx d = 1.0;
                            for (const auto& a : T.sigma.atoms()) {
                              const cplx q = w - a.position;
                              d -= a.weight * (1.0 + a.position * a.position) / (q * q);
                            }
                            return d;
                          },
                          w0);
  };
  auto valid = [&](const std::optional<cplx>& w) {
    return w && w->imag() >= z.imag() * (1.0 - 1e-12);
  };
  auto w = solve(z, z);
  if (!valid(w)) {
    const cplx far = z + cplx(0.0, 100.0);
    w = detail::continuation(solve, z, far - free_phi_at(T, far));
  }
  if (!valid(w)) throw NumericalError("free_idiv: inversion of z + phi did not converge");
  return *w;
}

TransformGrid free_idiv(const LevyTriple& T, const ComplexVector& points) {
  require_unit_mass(T, "free_idiv");
  return sample_transform([&](cplx z) { return free_idiv_at(T, z); }, points,
                          TransformKind::F, 1.0, 0.0);
}

CharacteristicFunction classical_idiv_cf(const LevyTriple& T) {
  require_unit_mass(T, "classical_idiv_cf");
  return [gamma = T.gamma, atoms = T.sigma.atoms()](double t) {
    cplx exponent(0.0, gamma * t);
    for (const auto& a : atoms) exponent += a.weight * levy_integrand(t, a.position);
    return std::exp(exponent);
  };
}

FlowResult monotone_idiv_flow(const LevyTriple& T, double t_end, double step,
                              const ComplexVector& points) {
  detail::flow_steps(t_end, step);
  FlowResult out;
  out.step_size = step;
  out.times = {0.0, 0.5 * t_end, t_end};
  TransformGrid g0{points, points, TransformKind::F, 1.0};
  TransformGrid half = g0, full = g0;
  half.mass = std::pow(T.m, 0.5 * t_end);
  full.mass = std::pow(T.m, t_end);
  for (Eigen::Index i = 0; i < points.size(); ++i) {
    if (!(points[i].imag() > 0.0)) throw ValidationError("flow grid point not in C+");
    half.values[i] = flow_from<double>(T, points[i], 0.5 * t_end, step).value;
    full.values[i] = flow_from<double>(T, half.values[i], 0.5 * t_end, step).value;
  }
  out.maps = {g0, half, full};
  return out;
}

FlowDistance flow_distance_bound(const LevyTriple& T1, const LevyTriple& T2,
                                 const ComplexVector& K, double step) {
  std::vector<cplx> nodes;
  double observed = 0.0;
  for (Eigen::Index i = 0; i < K.size(); ++i) {
    auto a = flow_from<double>(T1, K[i], 1.0, step, true);
    auto b = flow_from<double>(T2, K[i], 1.0, step, true);
    observed = std::max(observed, std::abs(a.value - b.value));
    nodes.insert(nodes.end(), a.path.begin(), a.path.end());
    nodes.insert(nodes.end(), b.path.begin(), b.path.end());
  }
  double re_lo = nodes.front().real(), re_hi = re_lo;
  double im_lo = nodes.front().imag(), im_hi = im_lo;
  for (const cplx& w : nodes) {
    re_lo = std::min(re_lo, w.real());
    re_hi = std::max(re_hi, w.real());
    im_lo = std::min(im_lo, w.imag());
    im_hi = std::max(im_hi, w.imag());
  }
  if (!(im_lo > 0.0)) throw NumericalError("flow_distance_bound: flow escapes C+");
  std::vector<cplx> samples = nodes;
  constexpr int kLattice = 40;
  for (int a = 0; a < kLattice; ++a)
    for (int b = 0; b < kLattice; ++b)
      samples.emplace_back(re_lo + (re_hi - re_lo) * a / (kLattice - 1),
                           im_lo + (im_hi - im_lo) * b / (kLattice - 1));
  double eps = 0.0, m1 = 0.0;
  for (const cplx& w : samples) {
    eps = std::max(eps, std::abs(phi_eval<double>(T1, w) - phi_eval<double>(T2, w)));
    m1 = std::max(m1, std::abs(phi_derivative(T2, w)));
  }
  const double factor = m1 > 1e-12 ? std::expm1(m1) / m1 : 1.0;
  const double bound = factor * eps;
  return {eps, m1, bound, observed, observed <= 2.0 * bound + 1e-13};
}

}  // namespace ncp
