#include "ncp/circle.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ncp/errors.hpp"
#include "ncp/newton.hpp"

namespace ncp {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const cplx I(0.0, 1.0);

void require_disk(cplx z) {
  if (!(std::abs(z) < 1.0)) throw ValidationError("disk transform requires |z| < 1");
}

cplx require_mean(const CircleMeasure& mu) {
  const cplx m = circle_mean(mu);
  if (std::abs(m) < 1e-14) throw ZeroMean("measure has mean zero");
  return m;
}

// (zeta^p - 1 - i p Im zeta)/(1 - Re zeta), symmetrized in theta.
cplx classical_integrand(double theta, int p) {
  const cplx zeta = std::polar(1.0, theta);
  const double s = std::sin(0.5 * theta);
  return (std::pow(zeta, p) - 1.0 - I * (p * std::sin(theta))) / (2.0 * s * s);
}

double extension_check(int p) {
  // Richardson on the symmetric average removes the odd and theta^2 terms.
  auto sym = [p](double th) {
    return 0.5 * (classical_integrand(th, p) + classical_integrand(-th, p));
  };
  const double th = 1e-4;
  const cplx cont = (4.0 * sym(th) - sym(2.0 * th)) / 3.0;
  return std::abs(cont - cplx(-static_cast<double>(p) * p, 0.0));
}

OperationReport circle_powers(const CircleArraySpec& spec, Operation op,
                              const std::function<CircleRow(int)>& row_of,
                              const DiskGrid& target, const VerdictRule& rule) {
  OperationReport report{op, {}, 0.0, false, {}};
  int current_n = 0;
  try {
    for (int n : spec.n_values) {
      current_n = n;
      const int k = spec.k(n);
      const CircleRow row = row_of(n);
      const DiskGrid g = sample_disk([&](cplx z) {
        return op == Operation::boolean ? boolean_circle_power(row, k, z)
                                        : monotone_circle_power(row, k, z);
      });
      report.rows.push_back({n, k, eta_distance(g, target)});
    }
  } catch (const std::exception& e) {
    report.error = "n = " + std::to_string(current_n) + ": " + e.what();
    return report;
  }
  report.converged = converged(report.rows, 0.0, rule);
  return report;
}

DiskGrid monotone_target(const CircleGenerator& A, double step) {
  return sample_disk([&](cplx z) { return circle_flow_at(A, z, 1.0, step); });
}

}  // namespace

CircleGenerator::CircleGenerator(double b, CircleMeasure s)
    : beta(b), sigma(s.atoms(), Role::parameter) {
  if (!std::isfinite(beta)) throw ValidationError("generator beta must be finite");
}

cplx herglotz_integral(const CircleMeasure& sigma, cplx z) {
  return sigma.integrate([&](cplx zeta) { return (1.0 + zeta * z) / (1.0 - zeta * z); });
}

cplx CircleGenerator::operator()(cplx z) const {
  return z * (I * beta - herglotz_integral(sigma, z));
}

const ComplexVector& disk_points() {
  static const ComplexVector pts = [] {
    ComplexVector p(16);
    int i = 0;
    for (double r : {0.4, 0.2})
      for (int j = 0; j < 8; ++j) p[i++] = std::polar(r, kTwoPi * j / 8.0);
    return p;
  }();
  return pts;
}

DiskGrid sample_disk(const std::function<cplx(cplx)>& f, const ComplexVector& points) {
  DiskGrid g{points, ComplexVector(points.size())};
  for (Eigen::Index i = 0; i < points.size(); ++i) {
    const cplx v = f(points[i]);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw NumericalError("non-finite eta value on the disk grid");
    g.values[i] = v;
  }
  return g;
}

double eta_distance(const DiskGrid& a, const DiskGrid& b) {
  if (a.points.size() != b.points.size() || (a.points - b.points).cwiseAbs().maxCoeff() > 1e-14)
    throw ValidationError("eta_distance: grids are not on the same points");
  return (a.values - b.values).cwiseAbs().maxCoeff();
}

cplx psi(const CircleMeasure& mu, cplx z) {
  require_disk(z);
  return mu.integrate([&](cplx zeta) { return z * zeta / (1.0 - z * zeta); });
}

cplx eta(const CircleMeasure& mu, cplx z) {
  const cplx p = psi(mu, z);
  if (std::abs(1.0 + p) < 1e-300) throw NumericalError("eta: 1 + psi vanishes");
  return p / (1.0 + p);
}

cplx eta_derivative(const CircleMeasure& mu, cplx z) {
  const cplx p = psi(mu, z);
  const cplx dp = mu.integrate([&](cplx zeta) {
    const cplx d = 1.0 - z * zeta;
    return zeta / (d * d);
  });
  return dp / ((1.0 + p) * (1.0 + p));
}

DiskGrid eta_grid(const CircleMeasure& mu) {
  return sample_disk([&](cplx z) { return eta(mu, z); });
}

cplx circle_mean(const CircleMeasure& mu) { return circle_moment(mu, 1); }

cplx sigma_transform(const CircleMeasure& mu, cplx z) {
  const cplx m = require_mean(mu);
  if (std::abs(z) > 0.2 * std::abs(m) + 1e-15)
    throw ValidationError("sigma_transform: |z| must be at most 0.2 |mean|");
  if (z == cplx{}) return 1.0 / m;
  auto w = detail::newton([&](cplx v) { return eta(mu, v) - z; },
                          [&](cplx v) { return eta_derivative(mu, v); }, z / m);
  if (!w) throw NumericalError("sigma_transform: Newton inversion of eta failed");
  return *w / z;
}

DiskGrid mult_boolean(const CircleMeasure& mu, const CircleMeasure& nu) {
  return sample_disk([&](cplx z) { return eta(mu, z) * eta(nu, z) / z; });
}

DiskGrid mult_monotone(const CircleMeasure& mu, const CircleMeasure& nu) {
  return sample_disk([&](cplx z) { return eta(mu, eta(nu, z)); });
}

cplx mult_free_at(const CircleMeasure& mu, const CircleMeasure& nu, cplx z) {
  const cplx m1 = require_mean(mu);
  const cplx m2 = require_mean(nu);
  require_disk(z);
  if (z == cplx{}) return z;
  // eta_mu(a) = w, eta_nu(b) = w, a b = z w. Scaling a = z alpha, b = z beta,
  // w = z omega removes the trivial branch a = b = w = 0:
  //   eta_mu(z alpha)/z = omega, eta_nu(z beta)/z = omega, alpha beta = omega,
  // regular at z = 0 with alpha = m2, beta = m1, omega = m1 m2.
  constexpr int kStages = 40;
  Eigen::Vector3cd x(m2, m1, m1 * m2);
  for (int s = 1; s <= kStages; ++s) {
    const cplx zs = z * (static_cast<double>(s) / kStages);
    auto residual = [&] {
      return Eigen::Vector3cd(eta(mu, zs * x[0]) / zs - x[2], eta(nu, zs * x[1]) / zs - x[2],
                              x[0] * x[1] - x[2]);
    };
    bool done = false;
    for (int it = 0; it < 60; ++it) {
      const Eigen::Vector3cd r = residual();
      if (r.cwiseAbs().maxCoeff() <= 1e-14) {
        done = true;
        break;
      }
      Eigen::Matrix3cd J;
      J << eta_derivative(mu, zs * x[0]), 0.0, -1.0,
           0.0, eta_derivative(nu, zs * x[1]), -1.0,
           x[1], x[0], -1.0;
      x -= J.partialPivLu().solve(r);
      if (!x.allFinite() || std::abs(zs * x[0]) >= 1.0 || std::abs(zs * x[1]) >= 1.0)
        throw NumericalError("mult_free: Newton left the disk");
    }
    if (!done && residual().cwiseAbs().maxCoeff() > 1e-12)
      throw NumericalError("mult_free: continuation stage did not converge");
  }
  return z * x[2];
}

DiskGrid mult_free(const CircleMeasure& mu, const CircleMeasure& nu) {
  return sample_disk([&](cplx z) { return mult_free_at(mu, nu, z); });
}

cplx circle_boolean_idiv_at(cplx gamma, const CircleMeasure& sigma, cplx z) {
  require_disk(z);
  return gamma * z * std::exp(-herglotz_integral(sigma, z));
}

DiskGrid circle_boolean_idiv(cplx gamma, const CircleMeasure& sigma) {
  if (std::abs(std::abs(gamma) - 1.0) > 1e-12) throw ValidationError("|gamma| must be 1");
  return sample_disk([&](cplx z) { return circle_boolean_idiv_at(gamma, sigma, z); });
}

cplx circle_free_idiv_at(cplx gamma, const CircleMeasure& sigma, cplx z) {
  require_disk(z);
  // Sigma = conj(gamma) exp(...) gives mean gamma e^{-sigma(T)}, matching the
  // boolean family with the same gamma.
  const cplx g = std::conj(gamma);
  auto inv = [&](cplx w) { return w * g * std::exp(herglotz_integral(sigma, w)); };
  auto dinv = [&](cplx w) {
    const cplx dh = sigma.integrate([&](cplx zeta) {
      const cplx d = 1.0 - zeta * w;
      return 2.0 * zeta / (d * d);
    });
    return g * std::exp(herglotz_integral(sigma, w)) * (1.0 + w * dh);
  };
  auto solve = [&](cplx target, cplx w0) {
    return detail::newton([&](cplx w) { return inv(w) - target; }, dinv, w0);
  };
  const cplx scale = g * std::exp(mass(sigma));
  auto w = solve(z, z / scale);
  if (!w || !(std::abs(*w) <= std::abs(z) * (1.0 + 1e-12))) {
    cplx v = cplx{};
    w.reset();
    constexpr int kStages = 40;
    for (int s = 1; s <= kStages; ++s) {
      const cplx zs = z * (static_cast<double>(s) / kStages);
      auto next = solve(zs, s == 1 ? zs / scale : v);
      if (!next) throw NumericalError("circle_free_idiv: inversion did not converge");
      v = *next;
    }
    w = v;
  }
  return *w;
}

DiskGrid circle_free_idiv(cplx gamma, const CircleMeasure& sigma) {
  if (std::abs(std::abs(gamma) - 1.0) > 1e-12) throw ValidationError("|gamma| must be 1");
  return sample_disk([&](cplx z) { return circle_free_idiv_at(gamma, sigma, z); });
}

cplx circle_classical_idiv_fourier(cplx gamma, const CircleMeasure& sigma, int p) {
  if (std::abs(std::abs(gamma) - 1.0) > 1e-12) throw ValidationError("|gamma| must be 1");
  if (p < 0) throw ValidationError("Fourier index must be non-negative");
  cplx exponent{};
  for (const auto& a : sigma.atoms()) {
    if (a.angle == 0.0) {
      const double gap = extension_check(p);
      if (gap > 1e-6 * std::max(1.0, static_cast<double>(p) * p))
        throw ValidationError("atom at zeta = 1: extension disagrees with continuation");
      exponent += a.weight * -static_cast<double>(p) * p;
    } else {
      exponent += a.weight * classical_integrand(a.angle, p);
    }
  }
  return std::pow(gamma, p) * std::exp(exponent);
}

cplx circle_flow_at(const CircleGenerator& A, cplx z, double t, double step) {
  const int n = detail::flow_steps(t, step);
  require_disk(z);
  cplx w = z;
  if (n == 0) return w;
  const double h = t / n;
  const double bound = std::abs(z) * (1.0 + 1e-12) + 1e-300;
  for (int j = 0; j < n; ++j) {
    const cplx k1 = A(w);
    const cplx k2 = A(w + 0.5 * h * k1);
    const cplx k3 = A(w + 0.5 * h * k2);
    const cplx k4 = A(w + h * k3);
    w += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!(std::abs(w) <= bound)) throw NumericalError("circle flow: |eta_t(z)| exceeded |z|");
  }
  return w;
}

CircleFlowResult circle_monotone_flow(const CircleGenerator& A, double t_end, double step) {
  detail::flow_steps(t_end, step);
  CircleFlowResult out;
  out.step_size = step;
  out.times = {0.0, 0.5 * t_end, t_end};
  const ComplexVector& pts = disk_points();
  DiskGrid g0{pts, pts}, half{pts, ComplexVector(pts.size())}, full = half;
  for (Eigen::Index i = 0; i < pts.size(); ++i) {
    half.values[i] = circle_flow_at(A, pts[i], 0.5 * t_end, step);
    full.values[i] = circle_flow_at(A, half.values[i], 0.5 * t_end, step);
  }
  out.grids = {g0, half, full};
  for (double t : out.times) out.means.push_back(std::exp((I * A.beta - A.sigma_mass()) * t));
  return out;
}

cplx derivative_at_zero(const std::function<cplx(cplx)>& f, double h) {
  const cplx along_real = (f(cplx(h, 0.0)) - f(cplx(-h, 0.0))) / (2.0 * h);
  const cplx along_imag = (f(cplx(0.0, h)) - f(cplx(0.0, -h))) / (2.0 * I * h);
  return 0.5 * (along_real + along_imag);
}

std::string to_string(CircleFamily f) {
  switch (f) {
    case CircleFamily::flow:
      return "flow";
    case CircleFamily::rotated_flow:
      return "rotated_flow";
    case CircleFamily::delta:
      return "delta";
  }
  return "?";
}

CircleFamily parse_circle_family(const std::string& name) {
  for (CircleFamily f : {CircleFamily::flow, CircleFamily::rotated_flow, CircleFamily::delta})
    if (to_string(f) == name) return f;
  throw ValidationError("unknown circle family '" + name + "'");
}

void CircleArraySpec::validate() const {
  ArraySpec probe;
  probe.n_values = n_values;
  probe.k_values = k_values;
  probe.validate();
  if (!(flow_step > 0.0) || flow_step > kMaxFlowStep)
    throw ValidationError("flow_step: must lie in (0, 1e-2]");
  if (family == CircleFamily::delta && !generator.sigma.empty())
    throw ValidationError("generator: the delta family requires sigma = 0");
}

int CircleArraySpec::k(int n) const {
  const auto it = std::find(n_values.begin(), n_values.end(), n);
  if (it == n_values.end()) throw ValidationError("n is not in n_values");
  return k_values.empty() ? n : k_values[it - n_values.begin()];
}

CircleRow CircleArraySpec::row(int n) const {
  const int kn = k(n);
  const double tau = 1.0 / kn;
  const cplx flow_mean = std::exp((I * generator.beta - generator.sigma_mass()) * tau);
  switch (family) {
    case CircleFamily::flow:
      return {[A = generator, tau, step = flow_step](cplx z) {
                return circle_flow_at(A, z, tau, step);
              },
              flow_mean};
    case CircleFamily::rotated_flow: {
      const cplx lambda = std::polar(1.0, kTwoPi * rotation / kn);
      return {[A = generator, tau, step = flow_step, lambda](cplx z) {
                return lambda * circle_flow_at(A, z, tau, step);
              },
              lambda * flow_mean};
    }
    case CircleFamily::delta: {
      const cplx zeta = std::polar(1.0, generator.beta * tau);
      return {[zeta](cplx z) { return zeta * z; }, zeta};
    }
  }
  throw ValidationError("unknown circle family");
}

cplx boolean_circle_power(const CircleRow& row, int k, cplx z) {
  const cplx ratio = row.eta(z) / z;
  cplx acc{1.0, 0.0}, base = ratio;
  for (int e = k; e > 0; e >>= 1) {
    if (e & 1) acc *= base;
    base *= base;
  }
  return z * acc;
}

cplx monotone_circle_power(const CircleRow& row, int k, cplx z) {
  cplx w = z;
  for (int j = 0; j < k; ++j) w = row.eta(w);
  return w;
}

int detect_rotation(cplx mean, int k, double beta, bool* ambiguous) {
  const double a = k * std::arg(mean);
  const double ell = std::round((beta - a) / kTwoPi);
  const double residual = std::abs(a + kTwoPi * ell - beta);
  if (ambiguous) *ambiguous = !(residual < std::numbers::pi - 1e-9);
  return static_cast<int>(ell);
}

RotationReport rotation_correction(const CircleArraySpec& spec, const VerdictRule& rule) {
  spec.validate();
  RotationReport out;
  const DiskGrid target = monotone_target(spec.generator, spec.flow_step);
  for (int n : spec.n_values) {
    bool amb = false;
    out.ell.push_back(detect_rotation(spec.row(n).mean, spec.k(n), spec.generator.beta, &amb));
    out.ambiguous.push_back(amb);
  }
  out.uncorrected = circle_powers(spec, Operation::monotone,
                                  [&](int n) { return spec.row(n); }, target, rule);
  out.corrected = circle_powers(
      spec, Operation::monotone,
      [&](int n) {
        const CircleRow r = spec.row(n);
        const int kn = spec.k(n);
        const int ell = detect_rotation(r.mean, kn, spec.generator.beta);
        const cplx lambda = std::polar(1.0, kTwoPi * ell / kn);
        return CircleRow{[eta = r.eta, lambda](cplx z) { return lambda * eta(z); },
                         lambda * r.mean};
      },
      target, rule);
  return out;
}

BetaCheck beta_condition_check(const CircleArraySpec& spec, double beta, double tolerance) {
  spec.validate();
  const int n = spec.n_values.back();
  const double value = spec.k(n) * spec.row(n).mean.imag();
  return {value, std::abs(value - beta) <= tolerance};
}

CircleEquivalence circle_equivalence(const CircleArraySpec& spec, const CircleGenerator& limit,
                                     const VerdictRule& rule) {
  spec.validate();
  CircleEquivalence out;
  out.beta = beta_condition_check(spec, limit.beta, rule.tolerance);
  const cplx gamma = std::polar(1.0, limit.beta);
  const DiskGrid boolean_target = circle_boolean_idiv(gamma, limit.sigma);
  const DiskGrid monotone = monotone_target(limit, spec.flow_step);
  auto rows = [&](int n) { return spec.row(n); };
  out.boolean = circle_powers(spec, Operation::boolean, rows, boolean_target, rule);
  out.monotone = circle_powers(spec, Operation::monotone, rows, monotone, rule);
  out.verdicts_agree = out.boolean.converged == out.monotone.converged;
  return out;
}

}  // namespace ncp
