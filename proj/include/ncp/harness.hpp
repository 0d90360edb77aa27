#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ncp/convolutions.hpp"
#include "ncp/idiv.hpp"
#include "ncp/measure.hpp"
#include "ncp/transforms.hpp"

namespace ncp {

enum class Operation { classical, free, boolean, monotone };

std::string to_string(Operation op);
// Throws ValidationError for an unknown name.
Operation parse_operation(const std::string& name);

enum class Family {
  bernoulli_clt,  // dilate((delta_-1 + delta_1)/2, 1/sqrt(n))
  poisson_type,   // (1 - lambda/n) delta_0 + (lambda/n) delta_1
  damped,         // (1 - c/n) * poisson_type(lambda)
  fixed,          // base, for every n
  drift,          // (1 - 1/n) delta_{1/sqrt(n)}
  custom          // rows[i] for n_values[i]
};

std::string to_string(Family f);
Family parse_family(const std::string& name);

struct ArraySpec {
  Family family = Family::bernoulli_clt;
  double lambda = 1.0;
  double c = 1.0;
  std::optional<FiniteAtomicMeasure> base;   // fixed
  std::vector<FiniteAtomicMeasure> rows;     // custom
  std::vector<int> n_values = {16, 32, 64, 128, 256};
  std::vector<int> k_values;                 // empty: k_n = n

  // Throws ValidationError naming the offending field.
  void validate() const;
  FiniteAtomicMeasure row(int n) const;
  int k(int n) const;
  int largest_n() const { return n_values.back(); }
};

struct ConditionE {
  int n;
  int k;
  double gamma;                // k sum w x/(x^2+1)
  FiniteAtomicMeasure sigma;   // atoms k w x^2/(x^2+1)
  double mass_power;           // mu_n(R)^k
};

ConditionE condition_e(const ArraySpec& spec, int n);

// (m_N^{k_N}, gamma_N, sigma_N) at the largest n of the horizon.
LevyTriple estimate_limit(const ArraySpec& spec);

// Reference for one operation: a Cauchy transform (with mass) for the
// half-plane operations or a characteristic function for the classical one.
struct PowerTarget {
  ComplexFunction cauchy;
  double mass = 1.0;
  CharacteristicFunction cf;
};

PowerTarget target_for(Operation op, const LevyTriple& T, double flow_step = kDefaultFlowStep);

// t in {+-0.5, +-1, ..., +-5}
const std::vector<double>& cf_t_grid();

struct VerdictRule {
  double tolerance = 0.05;
  double max_increase = 0.10;   // over the last three horizon points
  double tail_limit = 0.1;
  double tail_y = 20.0;         // mass - Y |Im G(iY)|
  double tail_t = 0.05;         // 1 - Re cf(t0)
};

struct DistanceRow {
  int n;
  int k;
  double distance;
};

struct OperationReport {
  Operation op;
  std::vector<DistanceRow> rows;
  double tail = 0.0;  // tightness measure at the largest n
  bool converged = false;
  std::string error;  // engine failure, with n
};

bool converged(const std::vector<DistanceRow>& rows, double tail, const VerdictRule& rule);

OperationReport run_powers(const ArraySpec& spec, Operation op, const PowerTarget& target,
                           const VerdictRule& rule = {});

// max over Z_R of |k (g(z) - z) - Phi(z)|
double chernoff_residual(const ComplexFunction& g, int k, const LevyTriple& T);
double chernoff_residual(const ArraySpec& spec, const LevyTriple& T, int n);

struct ConvergenceReport {
  LevyTriple limit;
  std::vector<ConditionE> condition;
  std::vector<double> sigma_distance;  // weak_distance(sigma_n, sigma) per n
  std::vector<OperationReport> ops;
  bool verdicts_agree = false;
};

// All four operations against the Levy family of `limit` (estimated from
// condition (e) when absent); verdict disagreement is a finding, not an error.
ConvergenceReport bp_crosscheck(const ArraySpec& spec,
                                std::optional<LevyTriple> limit = std::nullopt,
                                const VerdictRule& rule = {},
                                double flow_step = kDefaultFlowStep);

// Boolean and monotone powers for arrays of sub-probability measures.
// Throws ValidationError when m_N^{k_N} is degenerate or far from limit.m.
ConvergenceReport subprobability_equivalence(const ArraySpec& spec, const LevyTriple& limit,
                                             const VerdictRule& rule = {},
                                             double flow_step = kDefaultFlowStep);

struct TightnessRow {
  double y;
  double left;
  double right;
  bool holds;          // left <= 1.05 right
  double right_over_y;
};

std::vector<TightnessRow> tightness_diagnostics(const ArraySpec& spec, int n,
                                                const std::vector<double>& y_values);

}  // namespace ncp
