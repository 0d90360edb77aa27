#include "ncp/convolutions.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <numbers>

#include "ncp/errors.hpp"
#include "ncp/newton.hpp"

namespace ncp {
namespace {

Role product_role(const FiniteAtomicMeasure& a, const FiniteAtomicMeasure& b) {
  return a.role() == Role::state && b.role() == Role::state ? Role::state : Role::parameter;
}

void require_probability(const FiniteAtomicMeasure& mu, const char* what) {
  if (std::abs(mass(mu) - 1.0) > 1e-12)
    throw ValidationError(std::string(what) + " requires probability measures");
}

void require_power(int k) {
  if (k < 1) throw ValidationError("convolution power needs k >= 1");
}

cplx ipow(cplx c, int k) {
  cplx acc{1.0, 0.0};
  while (k > 0) {
    if (k & 1) acc *= c;
    c *= c;
    k >>= 1;
  }
  return acc;
}

}  // namespace

FiniteAtomicMeasure classical_convolve(const FiniteAtomicMeasure& mu,
                                       const FiniteAtomicMeasure& nu) {
  std::vector<Atom> atoms;
  atoms.reserve(mu.size() * nu.size());
  for (const auto& a : mu.atoms())
    for (const auto& b : nu.atoms()) atoms.push_back({a.position + b.position, a.weight * b.weight});
  return FiniteAtomicMeasure(std::move(atoms), product_role(mu, nu));
}

FiniteAtomicMeasure boolean_convolve(const FiniteAtomicMeasure& mu,
                                     const FiniteAtomicMeasure& nu) {
  const double m = mass(mu) * mass(nu);
  const RationalMap F =
      RationalMap(Polynomial({0.0, 1.0 / m})) - (e_transform(mu) + e_transform(nu));
  return recover_measure(F);
}

FiniteAtomicMeasure monotone_convolve(const FiniteAtomicMeasure& mu,
                                      const FiniteAtomicMeasure& nu, int degree_cap) {
  const RationalMap Fn = f_transform(nu);
  if (f_transform(mu).degree() * Fn.degree() > degree_cap)
    throw DegreeCapExceeded("monotone_convolve: composed degree exceeds cap");
  // G_{mu |> nu} = G_mu o F_nu has its poles where F_nu(p) = x_i, an atom of mu,
  // with residue w_i / F_nu'(p). F_nu is increasing between its poles, so each
  // level set is |nu| real simple roots of a low-degree polynomial.
  std::vector<Atom> atoms;
  for (const auto& x : mu.atoms()) {
    const Polynomial level = Fn.numerator() - x.position * Fn.denominator();
    for (const auto& r : real_roots(level)) {
      if (r.multiplicity != 1) throw NumericalError("monotone_convolve: multiple pole");
      const double d = Fn.derivative_at(cplx(r.root, 0.0)).real();
      if (!(d > 0.0)) throw NumericalError("monotone_convolve: non-increasing F");
      atoms.push_back({r.root, x.weight / d});
    }
  }
  return FiniteAtomicMeasure(std::move(atoms), product_role(mu, nu));
}

cplx free_convolve_at(const RationalMap& F_mu, const RationalMap& F_nu, cplx z,
                      SubordinationOptions opt) {
  auto h_mu = [&](cplx w) { return F_mu(w) - w; };
  auto h_nu = [&](cplx w) { return F_nu(w) - w; };
  auto T = [&](cplx w) { return z + h_mu(z + h_nu(w)); };

  cplx w = z;
  bool converged = false;
  for (int it = 0; it < opt.max_iterations; ++it) {
    const cplx next = T(w);
    const double step = std::abs(next - w);
    w = next;
    if (step <= opt.tolerance * std::max(1.0, std::abs(w))) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    // Slow Denjoy-Wolff approach; finish with Newton on w - T(w).
    auto dT = [&](cplx v) {
      const cplx u = z + h_nu(v);
      return (F_mu.derivative_at(u) - 1.0) * (F_nu.derivative_at(v) - 1.0);
    };
    auto polished = detail::newton([&](cplx v) { return v - T(v); },
                                   [&](cplx v) { return 1.0 - dT(v); }, w,
                                   {50, opt.tolerance * std::max(1.0, std::abs(w))});
    if (!polished || !(polished->imag() > 0.0))
      throw NumericalError("free convolution: subordination fixed point did not converge");
    w = *polished;
  }
  const cplx via_mu = F_mu(z + h_nu(w));
  const cplx via_nu = F_nu(w);
  if (std::abs(via_mu - via_nu) > opt.cross_check * std::max(1.0, std::abs(via_mu)))
    throw NumericalError("free convolution: subordination cross-check failed");
  return via_mu;
}

TransformGrid free_convolve(const FiniteAtomicMeasure& mu, const FiniteAtomicMeasure& nu,
                            const ComplexVector& points, SubordinationOptions opt) {
  require_probability(mu, "free_convolve");
  require_probability(nu, "free_convolve");
  const RationalMap Fm = f_transform(mu);
  const RationalMap Fn = f_transform(nu);
  return sample_transform([&](cplx z) { return free_convolve_at(Fm, Fn, z, opt); }, points,
                          TransformKind::F, 1.0, 0.0);
}

FiniteAtomicMeasure boolean_power(const FiniteAtomicMeasure& mu, int k) {
  require_power(k);
  const double mk = std::pow(mass(mu), k);
  const RationalMap F =
      RationalMap(Polynomial({0.0, 1.0 / mk})) - static_cast<double>(k) * e_transform(mu);
  return recover_measure(F);
}

cplx monotone_power_at(const RationalMap& F, int k, cplx z) {
  require_power(k);
  cplx w = z;
  for (int j = 0; j < k; ++j) {
    const cplx next = F(w);
    if (!(next.imag() >= w.imag() * (1.0 - 1e-12)))
      throw NumericalError("monotone power: imaginary part decreased");
    if (std::abs(next) > 1e12) throw NumericalError("monotone power: iterate overflow");
    w = next;
  }
  return w;
}

TransformGrid monotone_power_grid(const FiniteAtomicMeasure& mu, int k,
                                  const ComplexVector& points) {
  const RationalMap F = f_transform(mu);
  return sample_transform([&](cplx z) { return monotone_power_at(F, k, z); }, points,
                          TransformKind::F, std::pow(mass(mu), k), 0.0);
}

cplx free_power_at(const RationalMap& F, int k, cplx z) {
  require_power(k);
  if (k == 1) return F(z);
  const double kk = k;
  auto h = [&](cplx u) { return kk * u - (kk - 1.0) * F(u) - z; };
  auto dh = [&](cplx u) { return kk - (kk - 1.0) * F.derivative_at(u); };
  auto ok = [&](const std::optional<cplx>& u) {
    return u && u->imag() >= z.imag() * (1.0 - 1e-12);
  };
  auto u = detail::newton(h, dh, z);
  if (!ok(u)) {
    // u -> z/k + (1 - 1/k) F(u) maps the upper half-plane into itself and
    // converges to the subordination point.
    cplx v = z;
    for (int it = 0; it < 2000; ++it) {
      const cplx next = z / kk + (1.0 - 1.0 / kk) * F(v);
      const bool done = std::abs(next - v) <= 1e-10 * std::max(1.0, std::abs(v));
      v = next;
      if (done) break;
    }
    u = detail::newton(h, dh, v);
  }
  if (!ok(u)) throw NumericalError("free power: subordination equation did not converge");
  return F(*u);
}

TransformGrid free_power_grid(const FiniteAtomicMeasure& mu, int k,
                              const ComplexVector& points) {
  require_probability(mu, "free_power_grid");
  const RationalMap F = f_transform(mu);
  return sample_transform([&](cplx z) { return free_power_at(F, k, z); }, points,
                          TransformKind::F, 1.0, 0.0);
}

CharacteristicFunction characteristic_function(const FiniteAtomicMeasure& mu) {
  return [atoms = mu.atoms()](double t) {
    cplx acc{};
    for (const auto& a : atoms) acc += a.weight * std::polar(1.0, t * a.position);
    return acc;
  };
}

CharacteristicFunction classical_power_cf(const FiniteAtomicMeasure& mu, int k) {
  require_power(k);
  return [cf = characteristic_function(mu), k](double t) { return ipow(cf(t), k); };
}

std::vector<DensitySample> cf_density(const CharacteristicFunction& cf, FftOptions opt) {
  const int n = opt.samples;
  if (n < 4 || n % 2 != 0 || !(opt.t_max > 0.0))
    throw ValidationError("cf_density: need an even sample count and T > 0");
  const double dt = 2.0 * opt.t_max / n;
  const double dx = std::numbers::pi / opt.t_max;
  const double x0 = -0.5 * n * dx;
  std::vector<cplx> in(n), out;
  for (int k = 0; k < n; ++k) {
    const double t = -opt.t_max + k * dt;
    in[k] = cf(t) * std::polar(1.0, -t * x0);
  }
  // f(x_j) = dt/(2 pi) sum_k cf(t_k) e^{-i t_k x_j}, with x_j = x0 + j dx and
  // t_k = -T + k dt; dt dx = 2 pi / n reduces the sum to a forward DFT.
  Eigen::FFT<double> fft;
  fft.fwd(out, in);
  std::vector<DensitySample> density(n);
  for (int j = 0; j < n; ++j) {
    const double x = x0 + j * dx;
    const cplx phase = std::polar(1.0, opt.t_max * j * dx);
    density[j] = {x, (dt / (2.0 * std::numbers::pi) * phase * out[j]).real()};
  }
  return density;
}

}  // namespace ncp
