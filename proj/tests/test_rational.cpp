#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "ncp/errors.hpp"
#include "ncp/measure.hpp"
#include "ncp/rational.hpp"

using namespace ncp;

namespace {

std::vector<double> roots_of(const Polynomial& p) {
  std::vector<double> out;
  for (const auto& r : real_roots(p))
    for (int m = 0; m < r.multiplicity; ++m) out.push_back(r.root);
  return out;
}

double max_gap(const RationalMap& a, const RationalMap& b) {
  double gap = 0.0;
  for (double x : {-2.0, -0.7, 0.0, 0.4, 1.3, 3.0})
    for (double y : {0.5, 1.0, 2.0}) {
      const cplx z(x, y);
      gap = std::max(gap, std::abs(a(z) - b(z)));
    }
  return gap;
}

RationalMap z_minus_inv_z() { return RationalMap(Polynomial({-1.0, 0.0, 1.0}), Polynomial({0.0, 1.0})); }

}  // namespace

TEST(RealRoots, Examples) {
  auto r = roots_of(Polynomial({-2.0, 0.0, 1.0}));
  ASSERT_EQ(r.size(), 2u);
  EXPECT_NEAR(r[0], -std::sqrt(2.0), 1e-10);
  EXPECT_NEAR(r[1], std::sqrt(2.0), 1e-10);

  EXPECT_TRUE(real_roots(Polynomial({1.0, 0.0, 1.0})).empty());

  // quadratic formula for z^2 - z - 1
  r = roots_of(Polynomial({-1.0, -1.0, 1.0}));
  ASSERT_EQ(r.size(), 2u);
  EXPECT_NEAR(r[0], (1.0 - std::sqrt(5.0)) / 2.0, 1e-10);
  EXPECT_NEAR(r[1], (1.0 + std::sqrt(5.0)) / 2.0, 1e-10);

  EXPECT_THROW(real_roots(Polynomial({3.0})), ValidationError);
}

TEST(RealRoots, RandomProducts) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::uniform_int_distribution<int> deg(1, 8);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> xs(deg(rng));
    for (auto& x : xs) x = u(rng);
    std::sort(xs.begin(), xs.end());
    bool separated = true;
    for (std::size_t i = 1; i < xs.size(); ++i) separated &= xs[i] - xs[i - 1] > 1e-3;
    if (!separated) continue;
    const auto r = roots_of(Polynomial::from_roots(xs));
    ASSERT_EQ(r.size(), xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_NEAR(r[i], xs[i], 1e-8);
  }
}

TEST(Compose, Examples) {
  const double a = 0.3, b = -1.7;
  const RationalMap f(Polynomial({-a, 1.0})), g(Polynomial({-b, 1.0}));
  const RationalMap fg = compose(f, g);
  EXPECT_EQ(fg.numerator(), Polynomial({-(a + b), 1.0}));
  EXPECT_EQ(fg.denominator(), Polynomial({1.0}));

  // (z - 1/z) o (z - 1/z) = (z^4 - 3z^2 + 1)/(z^3 - z)
  const RationalMap h = compose(z_minus_inv_z(), z_minus_inv_z());
  const RationalMap oracle(Polynomial({1.0, 0.0, -3.0, 0.0, 1.0}), Polynomial({0.0, -1.0, 0.0, 1.0}));
  ASSERT_EQ(h.numerator().degree(), 4);
  ASSERT_EQ(h.denominator().degree(), 3);
  for (int i = 0; i <= 4; ++i) EXPECT_NEAR(h.numerator()[i], oracle.numerator()[i], 1e-14);
  for (int i = 0; i <= 3; ++i) EXPECT_NEAR(h.denominator()[i], oracle.denominator()[i], 1e-14);

  const RationalMap id = compose(RationalMap::identity(), z_minus_inv_z());
  EXPECT_EQ(id.numerator(), z_minus_inv_z().numerator());
  EXPECT_EQ(id.denominator(), z_minus_inv_z().denominator());
}

TEST(Compose, DegreeCap) {
  RationalMap f = z_minus_inv_z();
  EXPECT_THROW(
      {
        for (int i = 0; i < 10; ++i) f = compose(f, z_minus_inv_z());
      },
      DegreeCapExceeded);
}

TEST(Compose, Associative) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  auto random_map = [&] {
    // degree <= 2: (a z^2 + b z + c)/(z - d)
    return RationalMap(Polynomial({u(rng), u(rng), 1.0 + std::abs(u(rng))}),
                       Polynomial({-u(rng), 1.0}));
  };
  for (int trial = 0; trial < 20; ++trial) {
    const RationalMap f = random_map(), g = random_map(), h = random_map();
    const RationalMap left = compose(compose(f, g), h);
    const RationalMap right = compose(f, compose(g, h));
    EXPECT_EQ(left.numerator().degree(), right.numerator().degree());
    EXPECT_EQ(left.denominator().degree(), right.denominator().degree());
    EXPECT_LT(max_gap(left, right), 1e-9 * std::max(1.0, std::abs(left(cplx(0.0, 1.0)))));
  }
}

TEST(PartialFractions, Examples) {
  auto pf = partial_fractions(z_minus_inv_z());
  EXPECT_NEAR(pf.slope, 1.0, 1e-14);
  EXPECT_NEAR(pf.intercept, 0.0, 1e-14);
  ASSERT_EQ(pf.poles.size(), 1u);
  EXPECT_NEAR(pf.poles[0].location, 0.0, 1e-14);
  EXPECT_NEAR(pf.poles[0].residue, -1.0, 1e-14);

  // (z^2 - 2)/z = z - 2/z by division
  pf = partial_fractions(RationalMap(Polynomial({-2.0, 0.0, 1.0}), Polynomial({0.0, 1.0})));
  EXPECT_NEAR(pf.slope, 1.0, 1e-14);
  EXPECT_NEAR(pf.intercept, 0.0, 1e-14);
  ASSERT_EQ(pf.poles.size(), 1u);
  EXPECT_NEAR(pf.poles[0].residue, -2.0, 1e-14);

  // 1/(z^2 - 1): cover-up gives 1/2 at 1 and -1/2 at -1
  pf = partial_fractions(RationalMap(Polynomial({1.0}), Polynomial({-1.0, 0.0, 1.0})));
  EXPECT_NEAR(pf.slope, 0.0, 1e-14);
  EXPECT_NEAR(pf.intercept, 0.0, 1e-14);
  ASSERT_EQ(pf.poles.size(), 2u);
  EXPECT_NEAR(pf.poles[0].location, -1.0, 1e-12);
  EXPECT_NEAR(pf.poles[0].residue, -0.5, 1e-12);
  EXPECT_NEAR(pf.poles[1].location, 1.0, 1e-12);
  EXPECT_NEAR(pf.poles[1].residue, 0.5, 1e-12);
}

TEST(PartialFractions, RejectsComplexAndMultiplePoles) {
  EXPECT_THROW(partial_fractions(RationalMap(Polynomial({1.0}), Polynomial({1.0, 0.0, 1.0}))),
               ValidationError);
  EXPECT_THROW(partial_fractions(RationalMap(Polynomial({1.0}), Polynomial({0.0, 0.0, 1.0}))),
               ValidationError);
}

TEST(PartialFractions, Resummation) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-3.0, 3.0), y(1.0, 4.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> poles = {u(rng) - 6.0, u(rng), u(rng) + 6.0};
    Polynomial num({u(rng), u(rng), u(rng), 1.0 + std::abs(u(rng))});
    const RationalMap f(num, Polynomial::from_roots(poles));
    const auto pf = partial_fractions(f);
    for (int k = 0; k < 50; ++k) {
      const cplx z(u(rng), y(rng));
      EXPECT_LT(std::abs(pf(z) - f(z)), 1e-10 * std::max(1.0, std::abs(f(z))));
    }
  }
}

TEST(RationalMap, CancelsCommonRoots) {
  const RationalMap f(Polynomial::from_roots({1.0, 2.0}), Polynomial::from_roots({1.0, -3.0}));
  EXPECT_EQ(f.numerator().degree(), 1);
  EXPECT_EQ(f.denominator().degree(), 1);
  EXPECT_NEAR(f.denominator()[1], 1.0, 1e-15);
}
