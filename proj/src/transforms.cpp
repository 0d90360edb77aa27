#include "ncp/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ncp/errors.hpp"
#include "ncp/newton.hpp"

namespace ncp {
namespace {

constexpr double kResidueFloor = 1e-14;

void require_upper(cplx z) {
  if (!(z.imag() > 0.0))
    throw ValidationError("transform evaluation requires Im z > 0");
}

bool same_points(const ComplexVector& a, const ComplexVector& b) {
  if (a.size() != b.size()) return false;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > 1e-14 * std::max(1.0, std::abs(a[i]))) return false;
  return true;
}

double golden_max(const ComplexFunction& G, double eps, double lo, double hi) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  auto f = [&](double x) { return -G(cplx(x, eps)).imag(); };
  double a = lo, b = hi;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 80 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

std::vector<Eigen::Index> coarse_candidates(const TransformGrid& coarse, double eps_coarse) {
  std::vector<Eigen::Index> out;
  const Eigen::Index n = coarse.values.size();
  for (Eigen::Index k = 0; k < n; ++k) {
    const double v = -eps_coarse * coarse.values[k].imag();
    const double left = k > 0 ? -eps_coarse * coarse.values[k - 1].imag() : -1.0;
    const double right = k + 1 < n ? -eps_coarse * coarse.values[k + 1].imag() : -1.0;
    if (v > kAtomThreshold && v >= left && v > right) out.push_back(k);
  }
  return out;
}

bool stable(double w_fine, double w_coarse) {
  return w_fine > kAtomThreshold && w_coarse > kAtomThreshold &&
         std::abs(w_coarse - w_fine) <= kAtomStability * w_fine;
}

std::vector<DensitySample> density_from(const TransformGrid& fine) {
  std::vector<DensitySample> out;
  out.reserve(fine.points.size());
  for (Eigen::Index k = 0; k < fine.points.size(); ++k)
    out.push_back({fine.points[k].real(), -fine.values[k].imag() / std::numbers::pi});
  return out;
}

}  // namespace

ComplexVector TransformGrid::cauchy() const {
  switch (kind) {
    case TransformKind::G:
      return values;
    case TransformKind::F:
      return values.cwiseInverse();
    case TransformKind::E:
      return (points / mass - values).cwiseInverse();
  }
  return values;
}

ComplexVector TransformGrid::reciprocal_cauchy() const {
  switch (kind) {
    case TransformKind::G:
      return values.cwiseInverse();
    case TransformKind::F:
      return values;
    case TransformKind::E:
      return points / mass - values;
  }
  return values;
}

TransformGrid sample_transform(const ComplexFunction& f, const ComplexVector& points,
                               TransformKind kind, double mass, double imag_floor) {
  TransformGrid g{points, ComplexVector(points.size()), kind, mass};
  for (Eigen::Index i = 0; i < points.size(); ++i) {
    if (points[i].imag() < imag_floor)
      throw ValidationError("transform grid point below the imaginary floor");
    const cplx v = f(points[i]);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw NumericalError("non-finite transform value on grid");
    g.values[i] = v;
  }
  return g;
}

const ComplexVector& canonical_grid() {
  static const ComplexVector grid = [] {
    const double xs[] = {-3.0, -1.5, 0.0, 1.5, 3.0};
    const double ys[] = {1.0, 2.0};
    ComplexVector g(10);
    int i = 0;
    for (double y : ys)
      for (double x : xs) g[i++] = cplx(x, y);
    return g;
  }();
  return grid;
}

cplx cauchy_G(const FiniteAtomicMeasure& mu, cplx z) {
  require_upper(z);
  cplx acc{};
  for (const auto& a : mu.atoms()) acc += a.weight / (z - a.position);
  return acc;
}

RationalMap cauchy_rational(const FiniteAtomicMeasure& mu) {
  const auto xs = mu.positions();
  Polynomial den = Polynomial::from_roots(xs);
  Polynomial num;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    Polynomial term({mu.atoms()[j].weight});
    for (std::size_t i = 0; i < xs.size(); ++i)
      if (i != j) term = term * Polynomial::linear_root(xs[i]);
    num += term;
  }
  return RationalMap(std::move(num), std::move(den));
}

RationalMap f_transform(const FiniteAtomicMeasure& mu) {
  if (mu.empty()) throw ValidationError("F-transform of the zero measure");
  return cauchy_rational(mu).reciprocal();
}

RationalMap e_transform(const FiniteAtomicMeasure& mu) {
  const double m = mass(mu);
  return RationalMap(Polynomial({0.0, 1.0 / m})) - f_transform(mu);
}

cplx voiculescu_phi(const FiniteAtomicMeasure& mu, cplx z) {
  if (std::abs(mass(mu) - 1.0) > 1e-12)
    throw ValidationError("voiculescu_phi requires a probability measure");
  require_upper(z);
  const RationalMap F = f_transform(mu);
  auto solve = [&](cplx target, cplx w0) {
    return detail::newton([&](cplx w) { return F(w) - target; },
                          [&](cplx w) { return F.derivative_at(w); }, w0);
  };
  auto valid = [&](cplx w) {
    return w.imag() > 0.0 && w.imag() <= z.imag() * (1.0 + 1e-12) + 1e-12;
  };
  auto w = solve(z, z);
  if (!w || !valid(*w)) {
    const cplx far = z + cplx(0.0, 100.0);
    w = detail::continuation(solve, z, far);
  }
  if (!w || !valid(*w))
    throw NumericalError("voiculescu_phi: Newton inversion of F did not converge");
  return *w - z;
}

cplx nevanlinna_integral(const FiniteAtomicMeasure& sigma, cplx z) {
  cplx acc{};
  for (const auto& a : sigma.atoms())
    acc += a.weight * (1.0 + a.position * z) / (a.position - z);
  return acc;
}

cplx NevanlinnaData::operator()(cplx z) const {
  return z / m - gamma + nevanlinna_integral(sigma, z);
}

NevanlinnaData nevanlinna_decompose(const RationalMap& F, double m) {
  if (!(m > 0.0)) throw ValidationError("nevanlinna_decompose: mass must be positive");
  const PartialFractions pf = partial_fractions(F);
  if (std::abs(pf.slope * m - 1.0) > 1e-8)
    throw ValidationError("nevanlinna_decompose: slope " + std::to_string(pf.slope) +
                          " does not match 1/m");
  std::vector<Atom> atoms;
  double shift = 0.0;
  for (const auto& p : pf.poles) {
    if (p.residue > kResidueFloor * std::max(1.0, std::abs(p.location)))
      throw ValidationError("nevanlinna_decompose: positive residue, not an F-transform");
    const double s = -p.residue / (1.0 + p.location * p.location);
    if (s <= 0.0) continue;
    atoms.push_back({p.location, s});
    shift += p.location * s;
  }
  NevanlinnaData out;
  out.m = m;
  out.gamma = -pf.intercept - shift;
  out.sigma = FiniteAtomicMeasure(std::move(atoms), Role::parameter);
  return out;
}

RationalMap nevanlinna_synthesize(const NevanlinnaData& data) {
  const auto& atoms = data.sigma.atoms();
  std::vector<double> poles;
  double shift = 0.0;
  for (const auto& a : atoms) {
    poles.push_back(a.position);
    shift += a.weight * a.position;
  }
  Polynomial den = Polynomial::from_roots(poles);
  Polynomial num = Polynomial({-data.gamma - shift, 1.0 / data.m}) * den;
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    const double p = atoms[j].position;
    Polynomial term({-atoms[j].weight * (1.0 + p * p)});
    for (std::size_t i = 0; i < atoms.size(); ++i)
      if (i != j) term = term * Polynomial::linear_root(poles[i]);
    num += term;
  }
  return RationalMap(std::move(num), std::move(den));
}

FiniteAtomicMeasure recover_measure(const RationalMap& F) {
  const Polynomial& num = F.numerator();
  const Polynomial& den = F.denominator();
  if (num.is_zero() || num.degree() != den.degree() + 1)
    throw ValidationError("recover_measure: not the F-transform of a finite measure");
  const auto roots = real_roots(num);
  int counted = 0;
  const Polynomial dnum = num.derivative();
  std::vector<Atom> atoms;
  for (const auto& r : roots) {
    if (r.multiplicity != 1)
      throw ValidationError("recover_measure: multiple pole of G at " + std::to_string(r.root));
    ++counted;
    const double residue = den(r.root) / dnum(r.root);
    if (residue < -kResidueFloor)
      throw ValidationError("recover_measure: negative residue at " + std::to_string(r.root));
    if (residue > kResidueFloor) atoms.push_back({r.root, residue});
  }
  if (counted != num.degree())
    throw ValidationError("recover_measure: G has a non-real pole");
  double total = 0.0;
  for (const auto& a : atoms) total += a.weight;
  if (total > 1.0 && total <= 1.0 + 1e-9)
    for (auto& a : atoms) a.weight /= total;
  const Role role = total <= 1.0 + 1e-9 ? Role::state : Role::parameter;
  return FiniteAtomicMeasure(std::move(atoms), role);
}

TransformGrid sample_line(const ComplexFunction& G, double eps, Interval window,
                          int n_bins, double mass) {
  if (n_bins < 2 || !(window.hi > window.lo) || !(eps > 0.0))
    throw ValidationError("sample_line: need n_bins >= 2, a non-empty window and eps > 0");
  ComplexVector pts(n_bins);
  for (int k = 0; k < n_bins; ++k)
    pts[k] = cplx(window.lo + (window.hi - window.lo) * k / (n_bins - 1), eps);
  return sample_transform(G, pts, TransformKind::G, mass, 0.0);
}

InversionResult stieltjes_invert(const ComplexFunction& G, double eps, Interval window,
                                 int n_bins) {
  const TransformGrid fine = sample_line(G, eps, window, n_bins, 1.0);
  const TransformGrid coarse = sample_line(G, 10.0 * eps, window, n_bins, 1.0);
  InversionResult out;
  out.density = density_from(fine);
  const double h = (window.hi - window.lo) / (n_bins - 1);
  for (Eigen::Index k : coarse_candidates(coarse, 10.0 * eps)) {
    const double xc = coarse.points[k].real();
    const double x = golden_max(G, eps, xc - h, xc + h);
    const double w_fine = -eps * G(cplx(x, eps)).imag();
    const double w_coarse = -10.0 * eps * G(cplx(x, 10.0 * eps)).imag();
    if (stable(w_fine, w_coarse)) out.atoms.push_back({x, w_fine});
  }
  return out;
}

InversionResult stieltjes_invert(const TransformGrid& fine, const TransformGrid& coarse) {
  if (fine.kind != TransformKind::G || coarse.kind != TransformKind::G)
    throw ValidationError("stieltjes_invert expects Cauchy-transform grids");
  if (fine.points.size() != coarse.points.size() || fine.points.size() < 2)
    throw ValidationError("stieltjes_invert: grids must share abscissae");
  const double eps = fine.points[0].imag();
  const double eps_c = coarse.points[0].imag();
  InversionResult out;
  out.density = density_from(fine);
  for (Eigen::Index k : coarse_candidates(coarse, eps_c)) {
    const double w_fine = -eps * fine.values[k].imag();
    const double w_coarse = -eps_c * coarse.values[k].imag();
    if (stable(w_fine, w_coarse)) out.atoms.push_back({fine.points[k].real(), w_fine});
  }
  return out;
}

TransformGrid cauchy_grid(const FiniteAtomicMeasure& mu, const ComplexVector& points) {
  return sample_transform([&](cplx z) { return cauchy_G(mu, z); }, points,
                          TransformKind::G, mass(mu), 0.0);
}

TransformGrid cauchy_grid(const FiniteAtomicMeasure& mu) {
  return cauchy_grid(mu, canonical_grid());
}

double weak_distance(const TransformGrid& a, const TransformGrid& b) {
  if (!same_points(a.points, b.points))
    throw ValidationError("weak_distance: grids are not on the same points");
  const ComplexVector ga = a.cauchy();
  const ComplexVector gb = b.cauchy();
  return (ga - gb).cwiseAbs().maxCoeff() + std::abs(a.mass - b.mass);
}

double weak_distance(const FiniteAtomicMeasure& a, const FiniteAtomicMeasure& b) {
  return weak_distance(cauchy_grid(a), cauchy_grid(b));
}

double weak_distance(const FiniteAtomicMeasure& a, const TransformGrid& b) {
  return weak_distance(cauchy_grid(a, b.points), b);
}

double weak_distance(const TransformGrid& a, const FiniteAtomicMeasure& b) {
  return weak_distance(b, a);
}

StolzAngle::StolzAngle(double a, double b) : alpha(a), beta(b) {
  if (!(alpha > 0.0) || !(beta > 0.0))
    throw ValidationError("Stolz angle parameters must be positive");
}

bool StolzAngle::contains(cplx z) const {
  return z.imag() > beta && z.imag() > alpha * std::abs(z.real());
}

MaassenCheck maassen_bound_check(const FiniteAtomicMeasure& mu) {
  const double m = mass(mu);
  const double xs[] = {-4.0, -3.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 4.0};
  const double ys[] = {1.0, 1.2, 1.5, 2.0, 2.5, 3.0, 5.0, 8.0, 15.0, 40.0};
  double sup = 0.0;
  for (double y : ys)
    for (double x : xs) {
      const cplx z(x, y);
      const cplx F = 1.0 / cauchy_G(mu, z);
      sup = std::max(sup, std::abs(z / m - F));
    }
  // z/m - F_mu = (z - F_{mu/m})/m; the normalized measure has mean mu(x)/m and
  // variance genvar/m^2.
  const double bound = std::abs(first_moment(mu)) / (m * m) + generalized_variance(mu) / (m * m * m);
  return {sup, bound, sup <= bound * (1.0 + 1e-12) + 1e-14};
}

double mass_ratio_factor(double m) {
  if (!(m > 0.0) || m > 1.0) throw ValidationError("mass_ratio_factor needs m in (0,1]");
  const double L = -std::log(m);
  if (L < 1e-12) return 1.0;
  return std::expm1(L) / L;
}

TailEstimate stolz_tail_estimate(const FiniteAtomicMeasure& mu_n, int k, double y,
                                 double limit_mass) {
  if (k < 1 || !(y > 0.0)) throw ValidationError("stolz_tail_estimate: need k >= 1, y > 0");
  const double mn = mass(mu_n);
  const RationalMap F = f_transform(mu_n);
  const NevanlinnaData nd = nevanlinna_decompose(F, mn);
  TailEstimate out{};
  out.y = y;
  for (const auto& a : nd.sigma.atoms()) {
    if (std::abs(a.position) > y) out.tail_mass += k * a.weight;
    out.tail_bound +=
        2.0 * k * a.weight * (1.0 + a.position * a.position) / (a.position * a.position + y * y);
  }
  const cplx iy(0.0, y);
  out.tech_left = k * (F(iy) - iy / mn).imag() * mass_ratio_factor(limit_mass);
  cplx w = iy;
  for (int j = 0; j < k; ++j) w = F(w);
  out.tech_right = 2.0 * (w - iy / std::pow(mn, k)).imag();
  return out;
}

}  // namespace ncp
