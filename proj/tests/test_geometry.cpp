#include "orbispec/geometry.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>

using namespace orbispec;

namespace {

Rational q(long p, long d = 1) { return make_rational(p, d); }

Vec6<Rational> pt(GroupElement g) { return g.coords(); }

Mat6<Rational> ident() { return identity_mat<Rational>(); }

} // namespace

TEST(Coframe, Examples)
{
  const auto ai = MetricFamily::almost_inner;
  EXPECT_EQ(coframe(ai, q(0), pt(GroupElement())), ident());

  Mat6<Rational> c = ident();
  c[Z2][Y2] = q(1, 2);
  EXPECT_EQ(coframe(ai, q(1, 2), pt(GroupElement())), c);

  c = ident();
  c[Z1][Y1] = -1;
  c[Z2][Y2] = -1;
  EXPECT_EQ(coframe(ai, q(0), pt(GroupElement::from_ints(1, 0, 0, 0, 0, 0))), c);
}

TEST(Metric, Examples)
{
  const auto ai = MetricFamily::almost_inner;
  EXPECT_EQ(metric(ai, q(0), pt(GroupElement())), ident());
  Mat6<Rational> g = ident();
  g[Y2][Y2] = q(5, 4);
  g[Y2][Z2] = g[Z2][Y2] = q(1, 2);
  EXPECT_EQ(metric(ai, q(1, 2), pt(GroupElement())), g);
}

TEST(Metric, UnimodularPositiveDefiniteAndInverse)
{
  RationalSampler s(21);
  for (auto fam : {MetricFamily::almost_inner, MetricFamily::control}) {
    for (int k = 0; k < 100; ++k) {
      Rational t = s();
      GroupElement p = random_element(s);
      EXPECT_EQ(metric_determinant(fam, t, p), 1);
      auto g = metric(fam, t, pt(p));
      auto gi = inverse_metric(fam, t, pt(p));
      ASSERT_EQ(multiply(g, gi), ident());
      ASSERT_EQ(g, transpose(g));
    }
  }
  // Positive definiteness in floating point, through Eigen's LLT as an outside check.
  for (int k = 0; k < 1000; ++k) {
    Rational t = s();
    GroupElement p = random_element(s);
    auto g = metric(MetricFamily::almost_inner, t, pt(p));
    Eigen::Matrix<double, 6, 6> m;
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j)
        m(i, j) = to_double(g[i][j]);
    Eigen::LLT<Eigen::Matrix<double, 6, 6>> llt(m);
    ASSERT_EQ(llt.info(), Eigen::Success);
  }
}

TEST(Metric, LeftTranslationJacobianIsUnimodular)
{
  RationalSampler s(22);
  for (int k = 0; k < 100; ++k)
    ASSERT_EQ(determinant(to_matrix(left_translation(random_element(s)).linear)), 1);
}

TEST(Invariance, LeftInvariance)
{
  EXPECT_TRUE(left_invariance_check(MetricFamily::almost_inner, q(0), 1, 1).passed());
  EXPECT_TRUE(left_invariance_check(MetricFamily::almost_inner, q(0), 100, 2).passed());
  EXPECT_TRUE(left_invariance_check(MetricFamily::almost_inner, q(1, 4), 100, 3).passed());
  EXPECT_TRUE(left_invariance_check(MetricFamily::control, q(1, 4), 100, 4).passed());
  EXPECT_THROW(left_invariance_check(MetricFamily::almost_inner, q(0), 0, 1), std::invalid_argument);
}

TEST(Invariance, AlphaAndBeta)
{
  EXPECT_TRUE(alpha_isometry_check(MetricFamily::almost_inner, q(0), 100, 5).passed());
  EXPECT_TRUE(alpha_isometry_check(MetricFamily::almost_inner, q(1, 4), 100, 6).passed());
  EXPECT_TRUE(alpha_isometry_check(MetricFamily::control, q(1, 4), 100, 7).passed());
  EXPECT_FALSE(beta_isometry_check(MetricFamily::almost_inner, q(0), 100, 8).passed());
}

TEST(Invariance, PullbackConsistency) { EXPECT_TRUE(pullback_consistency_check(100, 9).passed()); }

TEST(Displacement, Examples)
{
  GroupElement x = GroupElement::from_ints(1, 1, 1, 1, 0, 0);
  auto c = displacement_equivariance(q(1, 4), LatticeElement::from_ints(0, 0, 0, 1, 0, 0), x);
  EXPECT_TRUE(c.verified);
  EXPECT_EQ(c.lhs, c.rhs);
  EXPECT_DOUBLE_EQ(displacement(phi_t(q(1, 4), GroupElement::from_ints(0, 0, 0, 1, 0, 0)), x),
                   displacement(GroupElement::from_ints(0, 0, 0, 1, 0, 0), mul(inverse(c.witness), x)));

  auto g = LatticeElement::from_ints(2, -1, 3, 0, 1, 1);
  auto d = displacement_equivariance(q(1, 4), g, x);
  EXPECT_TRUE(d.witness.is_identity());
  EXPECT_EQ(d.lhs, mul(mul(inverse(x), g.element()), x));
  EXPECT_DOUBLE_EQ(displacement(GroupElement(), x), 0.0);
}

TEST(Displacement, RandomBatch)
{
  RationalSampler s(23);
  for (int k = 0; k < 1000; ++k) {
    auto g = random_lattice_element(s, 3);
    GroupElement x = random_element(s);
    ASSERT_TRUE(displacement_equivariance(q(1, 3), g, x).verified);
  }
}
