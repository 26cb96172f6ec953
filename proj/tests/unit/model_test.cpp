#include <gtest/gtest.h>

#include <random>

#include "hfc4/model.hpp"
#include "hfc4/potential.hpp"

using namespace hfc4;

namespace {

ModelParams case1_reference() {
  ModelParams m;
  m.d = 3;
  m.N = 2;
  m.sigma1 = 1;
  m.sigma2 = 0;
  m.p = 3;
  m.gamma1 = m.gamma2 = 2;
  m.b = 1;
  m.bjk = {1, 1, 1, 1};
  return m;
}

/// Hand-rolled generator of parameter sets inside the hypotheses (d >= 5).
struct AdmissibleDraw {
  std::mt19937_64 rng;
  explicit AdmissibleDraw(std::uint64_t seed) : rng(seed) {}

  ModelParams next() {
    std::uniform_int_distribution<int> dim(5, 12), num(1, 40);
    for (;;) {
      ModelParams m;
      m.d = dim(rng);
      m.N = 1;
      m.bjk = {1.0};
      const double lo = std::max(0.0, m.d - 8.0);
      m.gamma1 = lo + (m.d - lo) * num(rng) / 41.0;
      m.gamma2 = lo + (m.d - lo) * num(rng) / 41.0;
      m.p = 2.0 + num(rng) / 8.0;
      m.rho1 = num(rng) / 64.0;
      m.rho2 = num(rng) / 64.0;
      if (validate_params(m).intercritical) return m;
    }
  }
};

}  // namespace

TEST(Rational, DoublesConvertExactly) {
  EXPECT_EQ(exact(0.1), Rational(3602879701896397) / Rational(36028797018963968));
  EXPECT_EQ(exact(2.5), Rational(5, 2));
  EXPECT_EQ(Exponent::infinity().reciprocal(), 0);
  EXPECT_TRUE(Exponent(Rational(3)) < Exponent::infinity());
}

TEST(CriticalExponents, WorkedValues) {
  EXPECT_EQ(critical_exponents(5, 2, 2, 0, 0).p_star, Exponent(Rational(7)));
  EXPECT_TRUE(critical_exponents(3, 2, 1.5, 0.3, 0).p_star.is_infinite());
  EXPECT_EQ(critical_exponents(3, 2, 2, 0, 0).p1_star, Exponent(Rational(3)));
}

TEST(CriticalExponents, HighDimensionBranchGuardsD4) {
  EXPECT_THROW(high_dimension_p_star(4, 2, 0), DomainError);
  EXPECT_NO_THROW(high_dimension_p_star(5, 2, 0));
}

TEST(CriticalExponents, LowDimensionsNeverRejectOnPStar) {
  for (int d : {3, 4})
    for (double p : {2.0, 5.0, 1e6}) {
      ModelParams m;
      m.d = d;
      m.p = p;
      m.bjk = {1.0};
      m.gamma1 = m.gamma2 = 1.0;
      EXPECT_TRUE(critical_exponents(d, 1, 1, 0, 0).p_star.is_infinite());
      EXPECT_TRUE(validate_params(m).at("p_range").holds) << d << " " << p;
    }
}

TEST(Validate, CaseOneReference) {
  const auto rep = validate_params(case1_reference());
  EXPECT_EQ(rep.decay_case, TheoremCase::case1);
  EXPECT_TRUE(rep.intercritical);
  EXPECT_FALSE(rep.at("p_above_p1_star").holds);  // p = p1* = 3
}

TEST(Validate, CaseTwoHighDimension) {
  ModelParams m;
  m.d = 5;
  m.N = 1;
  m.sigma2 = 1;
  m.rho1 = 1;
  m.p = 3;
  m.gamma1 = m.gamma2 = 2;
  m.bjk = {1.0};
  const auto rep = validate_params(m);
  EXPECT_EQ(rep.decay_case, TheoremCase::case2) << rep.text();
}

TEST(Validate, GammaAboveDimensionGivesNoCase) {
  ModelParams m = case1_reference();
  m.gamma1 = 9;
  const auto rep = validate_params(m);
  EXPECT_FALSE(rep.at("gamma1_range").holds);
  EXPECT_EQ(rep.decay_case, TheoremCase::none);
  EXPECT_EQ(rep.scattering_case, TheoremCase::none);
  EXPECT_FALSE(rep.messages.empty());
}

TEST(Validate, CaseOneNeedsEveryComponentDriven) {
  ModelParams m = case1_reference();
  m.sigma1 = 0;
  m.bjk = {0, 1, 1, 1};  // b_11 = 0 and σ1 = 0
  EXPECT_NE(validate_params(m).decay_case, TheoremCase::case1);
}

TEST(Validate, RhoCapReadsNAsD) {
  ModelParams m = case1_reference();
  // d = 3, γ = 2: cap = min{5, 4(1 + 2/3), 7} = 5
  m.rho1 = 4.9;
  EXPECT_TRUE(validate_params(m).at("rho1_range").holds);
  m.rho1 = 5.0;
  EXPECT_FALSE(validate_params(m).at("rho1_range").holds);
}

TEST(Validate, LowDimensionCondition) {
  ModelParams m = case1_reference();
  m.rho1 = 2.0;  // 2γ − 4ρ + d = 4 − 8 + 3 < 0
  EXPECT_FALSE(validate_params(m).at("rho1_low_dimension").holds);
  m.d = 6;
  m.gamma1 = m.gamma2 = 2;
  EXPECT_FALSE(validate_params(m).at("rho1_low_dimension").applicable);
}

TEST(Validate, StructuralViolationsThrow) {
  ModelParams m = case1_reference();
  m.b = -1;
  EXPECT_THROW(validate_params(m), ValidationError);
  m = case1_reference();
  m.bjk[1] = -0.5;
  EXPECT_THROW(validate_params(m), ValidationError);
  m = case1_reference();
  m.sigma1 = 2;
  EXPECT_THROW(validate_params(m), ValidationError);
}

TEST(Validate, PureFunction) {
  AdmissibleDraw gen(3);
  for (int i = 0; i < 20; ++i) {
    const auto m = gen.next();
    EXPECT_EQ(validate_params(m).text(), validate_params(m).text());
  }
}

TEST(Admissible, WorkedValues) {
  EXPECT_TRUE(is_biharmonic_admissible(Exponent::infinity(), Exponent(Rational(2)), 3));
  EXPECT_FALSE(is_biharmonic_admissible(Exponent(Rational(2)), Exponent::infinity(), 4));
  EXPECT_TRUE(is_biharmonic_admissible(Exponent(Rational(2)), Exponent(Rational(10)), 5));
  EXPECT_FALSE(is_biharmonic_admissible(Exponent(Rational(3, 2)), Exponent(Rational(10)), 5));
}

TEST(ScatteringPairs, WorkedValues) {
  ModelParams m;
  m.d = 5;
  m.N = 1;
  m.bjk = {1.0};
  m.p = 3;
  m.gamma1 = m.gamma2 = 2;
  const auto s = scattering_pairs(m);
  EXPECT_EQ(s.pairs[0].q, Exponent(Rational(3)));
  EXPECT_EQ(s.pairs[0].r, Exponent(Rational(30, 7)));
  EXPECT_EQ(s.pairs[5].q, Exponent(Rational(16, 3)));
  EXPECT_EQ(s.pairs[5].r, Exponent(Rational(20, 7)));
  // pair 2 is pair 1 at p = 2
  EXPECT_EQ(s.pairs[1].q, Exponent(Rational(16, 3)));
  EXPECT_EQ(s.pairs[1].r, Exponent(Rational(20, 7)));
}

TEST(ScatteringPairs, RelationHoldsExactlyOnRandomDraws) {
  AdmissibleDraw gen(11);
  for (int i = 0; i < 100; ++i) {
    const auto m = gen.next();
    const auto s = scattering_pairs(m);
    for (int k = 0; k < 8; ++k) {
      const auto& pr = s.pairs[k];
      EXPECT_TRUE(pr.relation) << "pair " << k + 1 << " d=" << m.d;
      EXPECT_EQ(4 * pr.q.reciprocal() + m.d * pr.r.reciprocal(), Rational(m.d, 2));
    }
  }
}

TEST(ScatteringPairs, ThetaFormula) {
  ModelParams m;
  m.d = 5;
  m.N = 1;
  m.bjk = {1.0};
  m.p = 3;
  m.gamma1 = m.gamma2 = 2;
  const auto s = scattering_pairs(m);
  // q1 = 3, q1' = 3/2: θ1 = (3 − 3/2)/(2·3·3/2 − 2·3/2) = (3/2)/6 = 1/4
  ASSERT_TRUE(s.theta[0].has_value());
  EXPECT_EQ(*s.theta[0], Rational(1, 4));
  // q6 = 16/3, q6' = 16/13, p = 2: θ6 = (16/3 − 16/13)/(16/13·2) = 5/3
  ASSERT_TRUE(s.theta[5].has_value());
  EXPECT_EQ(*s.theta[5], Rational(5, 3));
  EXPECT_FALSE(s.violations.empty());
}

TEST(Potential, GaussianBumpPasses) {
  const Grid g(3, 32, 20.0);
  PotentialSpec v{PotentialSpec::Family::gaussian_bump, 1.0, 2.0, {}};
  const auto rep = potential_admissibility(v, g);
  EXPECT_TRUE(rep.accepted) << rep.text();
  EXPECT_TRUE(rep.nonnegative);
  EXPECT_TRUE(rep.radially_nonincreasing);
  EXPECT_FALSE(rep.hardy_applicable);
  EXPECT_NE(rep.text().find("not applicable (d<5)"), std::string::npos);
}

TEST(Potential, ZeroPasses) {
  const Grid g(2, 16, 10.0);
  const auto rep = potential_admissibility(PotentialSpec{}, g);
  EXPECT_TRUE(rep.accepted);
  EXPECT_EQ(rep.ld4_norm, 0.0);
}

TEST(Potential, NegativeTableRejected) {
  const Grid g(2, 16, 10.0);
  PotentialSpec v;
  v.family = PotentialSpec::Family::tabulated;
  for (std::size_t i = 0; i < g.size(); ++i) v.table.push_back(-std::exp(-norm2(g.point(i))));
  const auto rep = potential_admissibility(v, g);
  EXPECT_FALSE(rep.accepted);
  EXPECT_FALSE(rep.nonnegative);
}

TEST(Potential, IncreasingProfileRejected) {
  const Grid g(2, 32, 10.0);
  PotentialSpec v;
  v.family = PotentialSpec::Family::tabulated;
  for (std::size_t i = 0; i < g.size(); ++i) v.table.push_back(1.0 - std::exp(-norm2(g.point(i))));
  const auto rep = potential_admissibility(v, g);
  EXPECT_TRUE(rep.nonnegative);
  EXPECT_FALSE(rep.radially_nonincreasing);
  EXPECT_FALSE(rep.accepted);
}
