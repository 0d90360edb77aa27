#include "ncp/harness.hpp"

#include <algorithm>
#include <cmath>

#include "ncp/errors.hpp"

namespace ncp {
namespace {

struct PowerEvaluator {
  ComplexFunction cauchy;
  double mass = 1.0;
  CharacteristicFunction cf;
};

PowerEvaluator power_of(const FiniteAtomicMeasure& mu, int k, Operation op) {
  switch (op) {
    case Operation::boolean: {
      FiniteAtomicMeasure b = boolean_power(mu, k);
      const double m = mass(b);
      return {[b = std::move(b)](cplx z) { return cauchy_G(b, z); }, m, {}};
    }
    case Operation::monotone: {
      RationalMap F = f_transform(mu);
      return {[F = std::move(F), k](cplx z) { return 1.0 / monotone_power_at(F, k, z); },
              std::pow(mass(mu), k), {}};
    }
    case Operation::free: {
      if (std::abs(mass(mu) - 1.0) > 1e-12)
        throw ValidationError("free powers require probability rows");
      RationalMap F = f_transform(mu);
      return {[F = std::move(F), k](cplx z) { return 1.0 / free_power_at(F, k, z); }, 1.0, {}};
    }
    case Operation::classical:
      if (std::abs(mass(mu) - 1.0) > 1e-12)
        throw ValidationError("classical powers require probability rows");
      return {{}, 1.0, classical_power_cf(mu, k)};
  }
  throw ValidationError("unknown operation");
}

ComplexVector on_grid(const ComplexFunction& f) {
  const ComplexVector& z = canonical_grid();
  ComplexVector out(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) out[i] = f(z[i]);
  return out;
}

double cf_distance(const CharacteristicFunction& a, const CharacteristicFunction& b) {
  double d = 0.0;
  for (double t : cf_t_grid()) d = std::max(d, std::abs(a(t) - b(t)));
  return d;
}

std::size_t index_of(const std::vector<int>& ns, int n) {
  const auto it = std::find(ns.begin(), ns.end(), n);
  if (it == ns.end()) throw ValidationError("n = " + std::to_string(n) + " is not in n_values");
  return static_cast<std::size_t>(it - ns.begin());
}

void require_increasing(const std::vector<int>& v, const char* field) {
  if (v.empty()) throw ValidationError(std::string(field) + ": must not be empty");
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] < 1) throw ValidationError(std::string(field) + ": entries must be >= 1");
    if (i > 0 && v[i] <= v[i - 1])
      throw ValidationError(std::string(field) + ": must be strictly increasing");
  }
}

}  // namespace

std::string to_string(Operation op) {
  switch (op) {
    case Operation::classical:
      return "classical";
    case Operation::free:
      return "free";
    case Operation::boolean:
      return "boolean";
    case Operation::monotone:
      return "monotone";
  }
  return "?";
}

Operation parse_operation(const std::string& name) {
  for (Operation op : {Operation::classical, Operation::free, Operation::boolean,
                       Operation::monotone})
    if (to_string(op) == name) return op;
  throw ValidationError("unknown operation '" + name + "'");
}

std::string to_string(Family f) {
  switch (f) {
    case Family::bernoulli_clt:
      return "bernoulli_clt";
    case Family::poisson_type:
      return "poisson_type";
    case Family::damped:
      return "damped";
    case Family::fixed:
      return "fixed";
    case Family::drift:
      return "drift";
    case Family::custom:
      return "custom";
  }
  return "?";
}

Family parse_family(const std::string& name) {
  for (Family f : {Family::bernoulli_clt, Family::poisson_type, Family::damped, Family::fixed,
                   Family::drift, Family::custom})
    if (to_string(f) == name) return f;
  throw ValidationError("unknown family '" + name + "'");
}

void ArraySpec::validate() const {
  require_increasing(n_values, "n_values");
  if (!k_values.empty()) {
    require_increasing(k_values, "k_values");
    if (k_values.size() != n_values.size())
      throw ValidationError("k_values: must have one entry per n_values entry");
  }
  switch (family) {
    case Family::poisson_type:
      if (!(lambda > 0.0) || lambda >= n_values.front())
        throw ValidationError("lambda: must lie in (0, smallest n)");
      break;
    case Family::damped:
      if (!(lambda > 0.0) || lambda >= n_values.front())
        throw ValidationError("lambda: must lie in (0, smallest n)");
      if (!(c > 0.0) || c >= n_values.front())
        throw ValidationError("c: must lie in (0, smallest n)");
      break;
    case Family::fixed:
      if (!base) throw ValidationError("base: required for the fixed family");
      if (base->role() != Role::state) throw ValidationError("base: must be a state measure");
      break;
    case Family::custom:
      if (rows.size() != n_values.size())
        throw ValidationError("rows: must have one measure per n_values entry");
      for (const auto& r : rows)
        if (r.role() != Role::state) throw ValidationError("rows: must be state measures");
      break;
    default:
      break;
  }
}

FiniteAtomicMeasure ArraySpec::row(int n) const {
  switch (family) {
    case Family::bernoulli_clt: {
      const double h = 1.0 / std::sqrt(static_cast<double>(n));
      return FiniteAtomicMeasure({{-h, 0.5}, {h, 0.5}});
    }
    case Family::poisson_type:
      return FiniteAtomicMeasure({{0.0, 1.0 - lambda / n}, {1.0, lambda / n}});
    case Family::damped: {
      const double s = 1.0 - c / n;
      return FiniteAtomicMeasure({{0.0, s * (1.0 - lambda / n)}, {1.0, s * lambda / n}});
    }
    case Family::fixed:
      if (!base) throw ValidationError("base: required for the fixed family");
      return *base;
    case Family::drift:
      return FiniteAtomicMeasure::dirac(1.0 / std::sqrt(static_cast<double>(n)), 1.0 - 1.0 / n);
    case Family::custom:
      return rows.at(index_of(n_values, n));
  }
  throw ValidationError("unknown family");
}

int ArraySpec::k(int n) const {
  const std::size_t i = index_of(n_values, n);
  return k_values.empty() ? n : k_values[i];
}

ConditionE condition_e(const ArraySpec& spec, int n) {
  const FiniteAtomicMeasure mu = spec.row(n);
  const int k = spec.k(n);
  double gamma = 0.0;
  std::vector<Atom> atoms;
  for (const auto& a : mu.atoms()) {
    const double x = a.position;
    gamma += k * a.weight * x / (x * x + 1.0);
    atoms.push_back({x, k * a.weight * x * x / (x * x + 1.0)});
  }
  return {n, k, gamma, FiniteAtomicMeasure(std::move(atoms), Role::parameter),
          std::pow(mass(mu), k)};
}

LevyTriple estimate_limit(const ArraySpec& spec) {
  const ConditionE ce = condition_e(spec, spec.largest_n());
  double m = ce.mass_power;
  if (std::abs(m - 1.0) <= 1e-9) m = 1.0;
  if (!(m > 0.0)) throw ValidationError("array mass vanishes at the horizon");
  return LevyTriple(m, ce.gamma, ce.sigma);
}

PowerTarget target_for(Operation op, const LevyTriple& T, double flow_step) {
  switch (op) {
    case Operation::boolean: {
      FiniteAtomicMeasure b = boolean_idiv(T);
      return {[b = std::move(b)](cplx z) { return cauchy_G(b, z); }, T.m, {}};
    }
    case Operation::monotone:
      return {[T, flow_step](cplx z) { return 1.0 / flow_at<double>(T, z, 1.0, flow_step); },
              T.m, {}};
    case Operation::free:
      if (T.m != 1.0) throw ValidationError("free target requires m = 1");
      return {[T](cplx z) { return 1.0 / free_idiv_at(T, z); }, 1.0, {}};
    case Operation::classical:
      return {{}, 1.0, classical_idiv_cf(T)};
  }
  throw ValidationError("unknown operation");
}

const std::vector<double>& cf_t_grid() {
  static const std::vector<double> grid = [] {
    std::vector<double> g;
    for (int j = -10; j <= 10; ++j)
      if (j != 0) g.push_back(0.5 * j);
    return g;
  }();
  return grid;
}

bool converged(const std::vector<DistanceRow>& rows, double tail, const VerdictRule& rule) {
  if (rows.empty() || !(rows.back().distance <= rule.tolerance)) return false;
  const std::size_t first = rows.size() >= 3 ? rows.size() - 2 : 1;
  for (std::size_t i = first; i < rows.size(); ++i)
    if (rows[i].distance > rows[i - 1].distance * (1.0 + rule.max_increase) + 1e-9)
      return false;
  return tail <= rule.tail_limit;
}

OperationReport run_powers(const ArraySpec& spec, Operation op, const PowerTarget& target,
                           const VerdictRule& rule) {
  spec.validate();
  OperationReport report{op, {}, 0.0, false, {}};
  const bool classical = op == Operation::classical;
  ComplexVector target_G;
  int current_n = 0;
  try {
    if (!classical) target_G = on_grid(target.cauchy);
    for (int n : spec.n_values) {
      current_n = n;
      const int k = spec.k(n);
      const PowerEvaluator p = power_of(spec.row(n), k, op);
      double d;
      if (classical) {
        d = cf_distance(p.cf, target.cf);
      } else {
        d = (on_grid(p.cauchy) - target_G).cwiseAbs().maxCoeff() + std::abs(p.mass - target.mass);
      }
      report.rows.push_back({n, k, d});
      if (n == spec.largest_n()) {
        if (classical) {
          report.tail = 1.0 - p.cf(rule.tail_t).real();
        } else {
          const double Y = rule.tail_y;
          report.tail = p.mass - Y * std::abs(p.cauchy(cplx(0.0, Y)).imag());
        }
      }
    }
  } catch (const std::exception& e) {
    report.error = "n = " + std::to_string(current_n) + ": " + e.what();
    return report;
  }
  report.converged = converged(report.rows, report.tail, rule);
  return report;
}

double chernoff_residual(const ComplexFunction& g, int k, const LevyTriple& T) {
  const ComplexVector& z = canonical_grid();
  double r = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i)
    r = std::max(r, std::abs(static_cast<double>(k) * (g(z[i]) - z[i]) - phi_eval<double>(T, z[i])));
  return r;
}

double chernoff_residual(const ArraySpec& spec, const LevyTriple& T, int n) {
  const RationalMap F = f_transform(spec.row(n));
  return chernoff_residual([&](cplx z) { return F(z); }, spec.k(n), T);
}

namespace {

ConvergenceReport run_family(const ArraySpec& spec, const LevyTriple& limit,
                             const std::vector<Operation>& ops, const VerdictRule& rule,
                             double flow_step) {
  ConvergenceReport out;
  out.limit = limit;
  for (int n : spec.n_values) {
    out.condition.push_back(condition_e(spec, n));
    out.sigma_distance.push_back(weak_distance(out.condition.back().sigma, limit.sigma));
  }
  for (Operation op : ops) {
    try {
      out.ops.push_back(run_powers(spec, op, target_for(op, limit, flow_step), rule));
    } catch (const NumericalError& e) {
      out.ops.push_back({op, {}, 0.0, false, std::string("target: ") + e.what()});
    }
  }
  out.verdicts_agree = std::all_of(out.ops.begin(), out.ops.end(), [&](const auto& r) {
    return r.converged == out.ops.front().converged;
  });
  return out;
}

}  // namespace

ConvergenceReport bp_crosscheck(const ArraySpec& spec, std::optional<LevyTriple> limit,
                                const VerdictRule& rule, double flow_step) {
  spec.validate();
  for (int n : spec.n_values)
    if (std::abs(mass(spec.row(n)) - 1.0) > 1e-12)
      throw ValidationError("bp_crosscheck requires probability rows");
  const LevyTriple T = limit ? *limit : estimate_limit(spec);
  return run_family(spec, T,
                    {Operation::classical, Operation::free, Operation::boolean,
                     Operation::monotone},
                    rule, flow_step);
}

ConvergenceReport subprobability_equivalence(const ArraySpec& spec, const LevyTriple& limit,
                                             const VerdictRule& rule, double flow_step) {
  spec.validate();
  const ConditionE ce = condition_e(spec, spec.largest_n());
  if (ce.mass_power < 1e-6)
    throw ValidationError("mass: mu_n(R)^k_n degenerates to 0");
  if (std::abs(ce.mass_power - limit.m) > rule.tolerance)
    throw ValidationError("mass: mu_n(R)^k_n does not approach the limit m");
  return run_family(spec, limit, {Operation::boolean, Operation::monotone}, rule, flow_step);
}

std::vector<TightnessRow> tightness_diagnostics(const ArraySpec& spec, int n,
                                                const std::vector<double>& y_values) {
  const FiniteAtomicMeasure mu = spec.row(n);
  const int k = spec.k(n);
  const double m = std::min(1.0, std::pow(mass(mu), k));
  std::vector<TightnessRow> out;
  for (double y : y_values) {
    const TailEstimate te = stolz_tail_estimate(mu, k, y, m);
    out.push_back({y, te.tech_left, te.tech_right,
                   te.tech_left <= 1.05 * te.tech_right + 1e-12, te.tech_right / y});
  }
  return out;
}

}  // namespace ncp
