#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ncp/errors.hpp"
#include "ncp/harness.hpp"

using namespace ncp;

namespace {

ArraySpec family(Family f) {
  ArraySpec s;
  s.family = f;
  return s;
}

ArraySpec fixed_bernoulli() {
  ArraySpec s = family(Family::fixed);
  s.base = FiniteAtomicMeasure({{-1.0, 0.5}, {1.0, 0.5}});
  return s;
}

ArraySpec dirac_array() {
  ArraySpec s = family(Family::fixed);
  s.base = FiniteAtomicMeasure::dirac(0.0);
  return s;
}

LevyTriple gaussian() { return LevyTriple(1.0, 0.0, FiniteAtomicMeasure::dirac(0.0, 1.0, Role::parameter)); }
LevyTriple poisson() { return LevyTriple(1.0, 0.5, FiniteAtomicMeasure::dirac(1.0, 0.5, Role::parameter)); }

// 1/sqrt(z^2 - a) asymptotic to 1/z
cplx arcsine_G(cplx z, double a) {
  const double r = std::sqrt(a);
  return 1.0 / (std::sqrt(z - r) * std::sqrt(z + r));
}

const OperationReport& op_report(const ConvergenceReport& r, Operation op) {
  for (const auto& o : r.ops)
    if (o.op == op) return o;
  throw std::logic_error("operation missing from report");
}

}  // namespace

TEST(ArraySpec, Validation) {
  ArraySpec s;
  s.n_values = {16, 16, 32};
  EXPECT_THROW(s.validate(), ValidationError);
  s.n_values = {16, 32};
  s.k_values = {5};
  EXPECT_THROW(s.validate(), ValidationError);
  s.k_values = {8, 4};
  EXPECT_THROW(s.validate(), ValidationError);
  s.k_values = {4, 8};
  EXPECT_NO_THROW(s.validate());
  EXPECT_EQ(s.k(32), 8);
  EXPECT_THROW(s.k(64), ValidationError);
  EXPECT_THROW(family(Family::fixed).validate(), ValidationError);
  ArraySpec c = family(Family::custom);
  c.rows = {FiniteAtomicMeasure::dirac(0.0)};
  EXPECT_THROW(c.validate(), ValidationError);
  try {
    s.n_values = {};
    s.validate();
    FAIL() << "empty n_values accepted";
  } catch (const ValidationError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("n_values", 0), 0u);
  }
}

TEST(ConditionE, Examples) {
  for (int n : {16, 256}) {
    const ConditionE b = condition_e(family(Family::bernoulli_clt), n);
    EXPECT_NEAR(b.gamma, 0.0, 1e-14);
    EXPECT_NEAR(mass(b.sigma), n / (n + 1.0), 1e-12);
    EXPECT_EQ(b.mass_power, 1.0);

    const ConditionE p = condition_e(family(Family::poisson_type), n);
    EXPECT_NEAR(p.gamma, 0.5, 1e-14);
    ASSERT_EQ(p.sigma.size(), 1u);
    EXPECT_NEAR(p.sigma.atoms()[0].position, 1.0, 0.0);
    EXPECT_NEAR(p.sigma.atoms()[0].weight, 0.5, 1e-14);
  }
  const ConditionE d = condition_e(dirac_array(), 64);
  EXPECT_EQ(d.gamma, 0.0);
  EXPECT_TRUE(d.sigma.empty());
}

TEST(ConditionE, BernoulliSigmaApproachesDirac) {
  const ArraySpec s = family(Family::bernoulli_clt);
  const auto d0 = FiniteAtomicMeasure::dirac(0.0, 1.0, Role::parameter);
  // mass gap 1/(n+1) plus |G_n - 1/z| <= (1/(n+1)) (1 + 1/(1 - 1/n)) on Im z >= 1
  double prev = 1e9;
  for (int n : s.n_values) {
    const double d = weak_distance(condition_e(s, n).sigma, d0);
    EXPECT_LT(d, prev);
    EXPECT_LE(d, (2.0 + 1.0 / (1.0 - 1.0 / n)) / (n + 1.0));
    prev = d;
  }
}

TEST(RunPowers, BernoulliBoolean) {
  const ArraySpec s = family(Family::bernoulli_clt);
  const auto rep = run_powers(s, Operation::boolean, target_for(Operation::boolean, gaussian()));
  ASSERT_TRUE(rep.error.empty()) << rep.error;
  for (const auto& row : rep.rows) EXPECT_LT(row.distance, 1e-12);
  EXPECT_TRUE(rep.converged);
}

TEST(RunPowers, BernoulliMonotone) {
  const ArraySpec s = family(Family::bernoulli_clt);
  PowerTarget arcsine{[](cplx z) { return arcsine_G(z, 2.0); }, 1.0, {}};
  const auto rep = run_powers(s, Operation::monotone, arcsine);
  ASSERT_EQ(rep.rows.size(), 5u);
  EXPECT_LE(rep.rows.back().distance, 0.05);
  for (std::size_t i = 1; i < rep.rows.size(); ++i) EXPECT_LT(rep.rows[i].distance, rep.rows[i - 1].distance);
  EXPECT_TRUE(rep.converged);
  // the flow target is the same law
  const auto flow = run_powers(s, Operation::monotone, target_for(Operation::monotone, gaussian()));
  EXPECT_NEAR(flow.rows.back().distance, rep.rows.back().distance, 1e-6);
}

TEST(RunPowers, PoissonBoolean) {
  const ArraySpec s = family(Family::poisson_type);
  const auto rep = run_powers(s, Operation::boolean, target_for(Operation::boolean, poisson()));
  EXPECT_LE(rep.rows.back().distance, 0.05);
  for (std::size_t i = 1; i < rep.rows.size(); ++i) EXPECT_LT(rep.rows[i].distance, rep.rows[i - 1].distance);
  EXPECT_TRUE(rep.converged);
}

TEST(RunPowers, EngineErrorRecordsN) {
  ArraySpec s = family(Family::damped);
  const auto rep = run_powers(s, Operation::free, target_for(Operation::free, poisson()));
  EXPECT_FALSE(rep.converged);
  EXPECT_EQ(rep.error.rfind("n = 16", 0), 0u) << rep.error;
}

TEST(Verdict, Rule) {
  const VerdictRule rule;
  EXPECT_TRUE(converged({{16, 16, 0.2}, {32, 32, 0.1}, {64, 64, 0.04}}, 0.0, rule));
  EXPECT_FALSE(converged({{16, 16, 0.2}, {32, 32, 0.1}, {64, 64, 0.06}}, 0.0, rule));
  // more than 10% increase within the last three points
  EXPECT_FALSE(converged({{16, 16, 0.01}, {32, 32, 0.02}, {64, 64, 0.03}}, 0.0, rule));
  EXPECT_TRUE(converged({{16, 16, 0.04}, {32, 32, 0.03}, {64, 64, 0.032}}, 0.0, rule));
  EXPECT_FALSE(converged({{16, 16, 0.01}}, 0.5, rule));
  EXPECT_FALSE(converged({}, 0.0, rule));
}

TEST(Chernoff, Examples) {
  EXPECT_LE(chernoff_residual(family(Family::bernoulli_clt), gaussian(), 256), 0.01);
  EXPECT_EQ(chernoff_residual(dirac_array(), LevyTriple(), 64), 0.0);
}

TEST(Chernoff, PoissonRate) {
  const ArraySpec s = family(Family::poisson_type);
  for (int n : {16, 32, 64, 128}) {
    const double ratio = chernoff_residual(s, poisson(), 2 * n) / chernoff_residual(s, poisson(), n);
    EXPECT_GE(ratio, 0.4);
    EXPECT_LE(ratio, 0.6);
  }
}

TEST(Chernoff, FlowRoot) {
  // g_k = F_{1/k}: k (g_k - id) - Phi = O(1/k)
  for (const LevyTriple& T : {gaussian(), poisson()}) {
    double prev = 0.0;
    for (int k : {8, 16, 32, 64, 128}) {
      const double r = chernoff_residual([&](cplx z) { return flow_at<double>(T, z, 1.0 / k, 1e-4); }, k, T);
      if (prev > 0.0) {
        EXPECT_GE(r / prev, 0.4) << "k=" << k;
        EXPECT_LE(r / prev, 0.6) << "k=" << k;
      }
      prev = r;
    }
  }
}

TEST(BpCrosscheck, Bernoulli) {
  const auto rep = bp_crosscheck(family(Family::bernoulli_clt));
  EXPECT_NEAR(rep.limit.gamma, 0.0, 1e-14);
  ASSERT_EQ(rep.ops.size(), 4u);
  for (const auto& o : rep.ops) EXPECT_TRUE(o.converged) << to_string(o.op) << " " << o.error;
  EXPECT_TRUE(rep.verdicts_agree);
}

TEST(BpCrosscheck, PoissonClassicalTarget) {
  const auto rep = bp_crosscheck(family(Family::poisson_type));
  EXPECT_NEAR(rep.limit.gamma, 0.5, 1e-12);
  for (const auto& o : rep.ops) EXPECT_TRUE(o.converged) << to_string(o.op) << " " << o.error;
  EXPECT_TRUE(rep.verdicts_agree);
  const auto cf = target_for(Operation::classical, rep.limit).cf;
  for (double t : cf_t_grid()) EXPECT_LT(std::abs(cf(t) - std::exp(std::polar(1.0, t) - 1.0)), 1e-12);
}

TEST(BpCrosscheck, NonInfinitesimal) {
  // The estimated target comes from the horizon row, so divergence shows in the
  // condition (e) data and in the mass escaping past Y rather than in the last distance.
  const auto rep = bp_crosscheck(fixed_bernoulli());
  for (const auto& o : rep.ops) {
    EXPECT_FALSE(o.converged) << to_string(o.op);
    EXPECT_GT(o.tail, 0.1) << to_string(o.op);
  }
  EXPECT_TRUE(rep.verdicts_agree);
  for (const auto& ce : rep.condition) EXPECT_NEAR(mass(ce.sigma), ce.n / 2.0, 1e-9);
  for (std::size_t i = 0; i + 1 < rep.sigma_distance.size(); ++i) EXPECT_GE(rep.sigma_distance[i], 0.1);
}

TEST(BpCrosscheck, RejectsSubprobability) {
  EXPECT_THROW(bp_crosscheck(family(Family::damped)), ValidationError);
}

TEST(Subprobability, DampedPoisson) {
  const LevyTriple limit(std::exp(-1.0), 0.5, FiniteAtomicMeasure::dirac(1.0, 0.5, Role::parameter));
  const auto rep = subprobability_equivalence(family(Family::damped), limit);
  ASSERT_EQ(rep.ops.size(), 2u);
  EXPECT_TRUE(op_report(rep, Operation::boolean).converged);
  EXPECT_TRUE(op_report(rep, Operation::monotone).converged);
  EXPECT_TRUE(rep.verdicts_agree);
}

TEST(Subprobability, MassOneMatchesCrosscheck) {
  const ArraySpec s = family(Family::poisson_type);
  const auto sub = subprobability_equivalence(s, poisson());
  const auto full = bp_crosscheck(s, poisson());
  for (Operation op : {Operation::boolean, Operation::monotone}) {
    const auto& a = op_report(sub, op);
    const auto& b = op_report(full, op);
    ASSERT_EQ(a.rows.size(), b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) EXPECT_EQ(a.rows[i].distance, b.rows[i].distance);
    EXPECT_EQ(a.converged, b.converged);
  }
}

TEST(Subprobability, DegenerateMass) {
  ArraySpec s = family(Family::custom);
  s.n_values = {16, 32};
  s.rows = {FiniteAtomicMeasure::dirac(0.0, 0.5), FiniteAtomicMeasure::dirac(0.0, 0.5)};
  EXPECT_THROW(subprobability_equivalence(s, LevyTriple(0.5, 0.0, FiniteAtomicMeasure::zero())),
               ValidationError);
}

TEST(Tightness, Examples) {
  const auto b = tightness_diagnostics(family(Family::bernoulli_clt), 256, {10.0});
  ASSERT_EQ(b.size(), 1u);
  EXPECT_TRUE(b[0].holds);

  const auto d = tightness_diagnostics(dirac_array(), 64, {5.0, 10.0});
  for (const auto& row : d) {
    EXPECT_NEAR(row.left, 0.0, 1e-12);
    EXPECT_NEAR(row.right, 0.0, 1e-12);
  }

  const auto p = tightness_diagnostics(family(Family::poisson_type), 256, {5.0, 10.0, 20.0});
  ASSERT_EQ(p.size(), 3u);
  EXPECT_GT(p[0].right_over_y, p[1].right_over_y);
  EXPECT_GT(p[1].right_over_y, p[2].right_over_y);
}

TEST(Harness, Reproducible) {
  const auto a = bp_crosscheck(family(Family::poisson_type));
  const auto b = bp_crosscheck(family(Family::poisson_type));
  for (std::size_t j = 0; j < a.ops.size(); ++j)
    for (std::size_t i = 0; i < a.ops[j].rows.size(); ++i)
      EXPECT_EQ(a.ops[j].rows[i].distance, b.ops[j].rows[i].distance);
}

TEST(Names, RoundTrip) {
  for (Operation op : {Operation::classical, Operation::free, Operation::boolean, Operation::monotone})
    EXPECT_EQ(parse_operation(to_string(op)), op);
  for (Family f : {Family::bernoulli_clt, Family::poisson_type, Family::damped, Family::fixed, Family::drift,
                   Family::custom})
    EXPECT_EQ(parse_family(to_string(f)), f);
  EXPECT_THROW(parse_operation("tensor"), ValidationError);
  EXPECT_THROW(parse_family("cauchy"), ValidationError);
}
