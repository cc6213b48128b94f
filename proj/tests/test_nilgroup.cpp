#include "orbispec/fixed_points.hpp"
#include "orbispec/suites.hpp"
#include "orbispec/witness.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace orbispec;

namespace {

Rational q(long p, long d = 1) { return make_rational(p, d); }

GroupElement el(long x1, long x2, long y1, long y2, long z1, long z2) { return GroupElement::from_ints(x1, x2, y1, y2, z1, z2); }

// Oracle: the group law typed in from its coordinate formula, independent of mul().
GroupElement law(const GroupElement& a, const GroupElement& b)
{
  return GroupElement(a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3], a[4] + b[4] + a[0] * b[2] + a[1] * b[3],
                      a[5] + b[5] + a[0] * b[3]);
}

} // namespace

TEST(Group, MulExamples)
{
  EXPECT_EQ(mul(el(1, 0, 0, 0, 0, 0), el(0, 0, 1, 0, 0, 0)), el(1, 0, 1, 0, 1, 0));
  EXPECT_EQ(mul(el(0, 0, 1, 0, 0, 0), el(1, 0, 0, 0, 0, 0)), el(1, 0, 1, 0, 0, 0));
  GroupElement x(q(1, 3), q(-2), q(5, 7), q(0), q(1, 2), q(9));
  EXPECT_EQ(mul(GroupElement(), x), x);
}

TEST(Group, InverseExamples)
{
  EXPECT_EQ(inverse(el(1, 0, 1, 0, 0, 0)), el(-1, 0, -1, 0, 1, 0));
  EXPECT_EQ(inverse(GroupElement()), GroupElement());
  EXPECT_EQ(inverse(GroupElement(0, 0, 0, 0, q(2, 3), q(-5, 4))), GroupElement(0, 0, 0, 0, q(-2, 3), q(5, 4)));
}

TEST(Group, ConjugateExamples)
{
  EXPECT_EQ(conjugate(el(1, 0, 0, 0, 0, 0), el(0, 0, 0, 1, 0, 0)), el(0, 0, 0, 1, 0, 1));
  GroupElement a(q(1, 2), q(3), q(-1, 5), q(2), q(7), q(1, 9));
  GroupElement c(0, 0, 0, 0, q(4, 3), q(-1, 6));
  EXPECT_EQ(conjugate(a, c), c);
  EXPECT_EQ(conjugate(a, a), a);
}

TEST(Group, PhiExamples)
{
  EXPECT_EQ(phi_t(q(1, 2), el(0, 0, 0, 1, 0, 0)), GroupElement(0, 0, 0, 1, 0, q(1, 2)));
  GroupElement x(q(1, 2), q(3), q(-1, 5), q(2), q(7), q(1, 9));
  EXPECT_EQ(phi_t(q(0), x), x);
  EXPECT_EQ(phi_t(q(3, 7), el(1, 2, 3, 0, 4, 5)), el(1, 2, 3, 0, 4, 5));
}

TEST(Group, RandomizedAxiomsAgainstCoordinateLaw)
{
  RationalSampler s(11);
  for (int k = 0; k < 1000; ++k) {
    GroupElement a = random_element(s), b = random_element(s), c = random_element(s);
    ASSERT_EQ(mul(a, b), law(a, b));
    ASSERT_EQ(mul(mul(a, b), c), mul(a, mul(b, c)));
    ASSERT_EQ(law(a, inverse(a)), GroupElement());
    ASSERT_EQ(law(inverse(a), a), GroupElement());
    // conjugate() against the expanded product a x a^-1
    ASSERT_EQ(conjugate(a, b), law(law(a, b), inverse(a)));
    GroupElement z(0, 0, 0, 0, s(), s());
    ASSERT_EQ(mul(z, a), mul(a, z));
  }
}

TEST(Group, LatticeClosure)
{
  RationalSampler s(12);
  for (int k = 0; k < 1000; ++k) {
    LatticeElement a = random_lattice_element(s, 5), b = random_lattice_element(s, 5);
    ASSERT_TRUE(mul(a.element(), b.element()).is_lattice());
    ASSERT_TRUE(inverse(a.element()).is_lattice());
  }
  EXPECT_THROW(LatticeElement(GroupElement(q(1, 2), 0, 0, 0, 0, 0)), std::invalid_argument);
}

TEST(Automorphism, Examples)
{
  RationalSampler s(13);
  for (int k = 0; k < 20; ++k)
    EXPECT_TRUE(is_automorphism(phi_t_map(s())).is_automorphism);
  EXPECT_TRUE(is_automorphism(phi_alpha_map()).is_automorphism);
  AutomorphismCertificate b = is_automorphism(phi_beta_map());
  EXPECT_FALSE(b.is_automorphism);
  bool x1y1 = false;
  for (const auto& d : b.defects)
    x1y1 = x1y1 || (d.i == X1 && d.j == Y1);
  EXPECT_TRUE(x1y1);
  EXPECT_TRUE(is_automorphism(psi_s_map(q(1, 4))).is_automorphism);
  Matrix6 singular = identity6();
  singular[Z2][Z2] = 0;
  EXPECT_THROW(is_automorphism(LinearCoordinateMap(singular)), std::invalid_argument);
}

TEST(Automorphism, BasisPairCertificateAgreesWithRandomPairs)
{
  // Bilinearity: a map passing the 36 basis pairs is a homomorphism on random pairs.
  RationalSampler s(14);
  for (const auto& f : {phi_t_map(q(2, 7)), phi_alpha_map(), psi_s_map(q(-3, 5))}) {
    ASSERT_TRUE(is_automorphism(f).is_automorphism);
    for (int k = 0; k < 200; ++k) {
      GroupElement a = random_element(s), b = random_element(s);
      ASSERT_EQ(f(mul(a, b)), mul(f(a), f(b)));
    }
  }
  bool beta_fails = false;
  for (int k = 0; k < 50 && !beta_fails; ++k) {
    GroupElement a = random_element(s), b = random_element(s);
    beta_fails = phi_beta_map()(mul(a, b)) != mul(phi_beta_map()(a), phi_beta_map()(b));
  }
  EXPECT_TRUE(beta_fails);
}

TEST(Pi, AlphaInvolutionAndNormalizer)
{
  const AffineMap a = alpha().as_affine();
  EXPECT_EQ(compose(a, a), AffineMap{});
  for_each_lattice_in_box(1, [&](const LatticeElement& g) {
    auto img = as_left_translation(compose(compose(a, left_translation(g.element())), affine_inverse(a)));
    ASSERT_TRUE(img.has_value());
    ASSERT_TRUE(img->is_lattice());
  });
  auto e = PiGroup::classify(alpha() * gamma_isometry(LatticeElement::from_ints(1, 0, 2, 0, -1, 3)));
  ASSERT_TRUE(e.has_value());
  EXPECT_EQ(e->coset, PiGroup::Coset::alpha_gamma);
  EXPECT_EQ(e->gamma.element(), el(1, 0, 2, 0, -1, 3));
  EXPECT_FALSE(PiGroup::classify(beta()).has_value());
}

TEST(Pi, SemidirectCompositionIsAssociative)
{
  RationalSampler s(15);
  for (int k = 0; k < 200; ++k) {
    AffineIsometry u{certify_automorphism(phi_t_map(s())), random_element(s)};
    AffineIsometry v{alpha().linear(), random_element(s)};
    AffineIsometry w{certify_automorphism(psi_s_map(s())), random_element(s)};
    ASSERT_EQ((u * v) * w, u * (v * w));
    GroupElement x = random_element(s);
    ASSERT_EQ((u * v)(x), u(v(x)));
  }
}

TEST(Witness, Examples)
{
  auto w = almost_inner_witness(q(1, 4), LatticeElement::from_ints(0, 0, 0, 1, 0, 0));
  ASSERT_TRUE(w.verified);
  EXPECT_EQ(*w.a, GroupElement(q(1, 4), 0, 0, 0, 0, 0));
  w = almost_inner_witness(q(1, 4), LatticeElement::from_ints(0, 0, 1, 1, 0, 0));
  ASSERT_TRUE(w.verified);
  EXPECT_EQ(*w.a, GroupElement(q(1, 4), q(-1, 4), 0, 0, 0, 0));
  w = almost_inner_witness(q(2, 9), LatticeElement::from_ints(3, -1, 4, 0, 2, 2));
  ASSERT_TRUE(w.verified);
  EXPECT_TRUE(w.a->is_identity());
}

TEST(Witness, GeneralSolverReportsUnsolvableForControl)
{
  // Psi_s(gamma) = a gamma a^-1 at gamma = (0,0,1,0,0,0) needs 0 = s.
  auto w = almost_inner_witness(psi_s_map(q(1, 4)), LatticeElement::from_ints(0, 0, 1, 0, 0, 0));
  EXPECT_EQ(w.status, WitnessCertificate::Status::unsolvable);
  EXPECT_FALSE(w.verified);
  auto ok = almost_inner_witness(psi_s_map(q(0)), LatticeElement::from_ints(0, 0, 1, 0, 0, 0));
  EXPECT_TRUE(ok.verified);
}

TEST(Witness, TwistedExamples)
{
  auto w = twisted_witness(q(1, 4), LatticeElement::from_ints(0, 0, 1, 0, 0, 0));
  ASSERT_TRUE(w.verified);
  EXPECT_EQ(*w.a, GroupElement(q(1, 4), 0, 0, 0, q(1, 8), 0));
  w = twisted_witness(q(3, 5), LatticeElement::from_ints(0, 0, 0, 0, 0, 0));
  ASSERT_TRUE(w.verified);
  EXPECT_EQ(*w.a, GroupElement(q(3, 5), 0, 0, 0, 0, 0));
  w = twisted_witness(q(0), LatticeElement::from_ints(2, 1, -3, 1, 0, 4));
  ASSERT_TRUE(w.verified);
  EXPECT_TRUE(w.a->is_identity());
}

TEST(Witness, TwistedAgreesWithMatrixComposition)
{
  // Oracle: compose the affine maps as 6x6 rational matrices and compare.
  const AffineMap al = alpha().as_affine();
  for_each_lattice_in_box(1, [&](const LatticeElement& g) {
    for (const Rational& t : {q(1, 4), q(1, 3), q(-7, 2)}) {
      auto w = twisted_witness(t, g);
      ASSERT_TRUE(w.verified);
      AffineMap lhs = compose(compose(left_translation(*w.a), compose(al, left_translation(g.element()))),
                              left_translation(inverse(*w.a)));
      ASSERT_EQ(lhs, compose(al, left_translation(phi_t(t, g.element()))));
    }
  });
}

TEST(Witness, NonInnerCertificate)
{
  for (const Rational& t : {q(1, 4), q(1, 3)}) {
    NonInnerCertificate c = not_inner_certificate(t);
    EXPECT_TRUE(c.valid());
    EXPECT_EQ(c.a1_forced_by_first, t);
    EXPECT_EQ(c.a1_forced_by_second, 0);
  }
  EXPECT_THROW(not_inner_certificate(q(0)), std::invalid_argument);
}

TEST(Witness, LatticeReduction)
{
  auto r = lattice_reduction_check(q(5, 4), 2);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.reduced, q(1, 4));
  // Phi_{1/2} and Phi_{1/4} give different lattices: (0,0,0,1,0,0) separates them.
  GroupElement img = phi_t_inverse(q(1, 4), phi_t(q(1, 2), el(0, 0, 0, 1, 0, 0)));
  EXPECT_FALSE(img.is_lattice());
}

TEST(FixedPoints, Examples)
{
  FixedPointSolution a = fixed_points(alpha());
  ASSERT_FALSE(a.empty);
  EXPECT_TRUE(a.is_x_plane());
  auto v = a.plane_values();
  EXPECT_EQ(v[0], 0);
  EXPECT_EQ(v[1], 0);
  EXPECT_EQ(v[2], 0);
  EXPECT_EQ(v[3], q(1, 4));

  EXPECT_TRUE(fixed_points(gamma_isometry(LatticeElement::from_ints(0, 0, 0, 0, 0, 1))).empty);

  AffineIsometry m{alpha().linear(), GroupElement(0, 0, 1, 0, 0, q(1, 2))};
  FixedPointSolution s = fixed_points(m);
  ASSERT_FALSE(s.empty);
  v = s.plane_values();
  EXPECT_EQ(v[0], q(1, 2));
  EXPECT_EQ(v[1], 0);
  EXPECT_EQ(v[2], 0);
  EXPECT_EQ(v[3], q(1, 4));
  // Every sampled point of the plane is fixed.
  RationalSampler r(16);
  for (int k = 0; k < 50; ++k) {
    GroupElement p = s.sample({r(), r()});
    ASSERT_EQ(m(p), p);
  }
}

TEST(FixedPoints, IsotropyExamples)
{
  EXPECT_EQ(isotropy_group(GroupElement(0, 0, 0, 0, 0, q(1, 4))).size(), 2u);
  EXPECT_EQ(isotropy_group(GroupElement(0, 0, q(1, 3), 0, 0, 0)).size(), 1u);
  auto iso = isotropy_group(GroupElement(q(5, 7), q(-2), q(1, 2), q(1, 2), q(1, 2), q(3, 4)));
  ASSERT_EQ(iso.size(), 2u);
  EXPECT_EQ(iso[1], (AffineIsometry{alpha().linear(), GroupElement(0, 0, 1, 1, 1, q(3, 2))}));
}

TEST(FixedPoints, IsotropyMatchesBruteForceSearch)
{
  // Oracle: search Pi elements with translations in a box for maps fixing the point.
  const std::vector<GroupElement> points = {
      GroupElement(0, 0, 0, 0, 0, q(1, 4)),         GroupElement(q(1, 3), 0, q(1, 2), 0, q(-1, 2), q(-3, 4)),
      GroupElement(0, 0, q(1, 3), 0, 0, 0),         GroupElement(q(2), q(-1), 1, q(1, 2), 0, q(1, 4)),
      GroupElement(0, 0, q(1, 2), q(1, 2), 0, q(1, 2)), GroupElement(q(1, 5), q(2, 5), 0, 0, 0, q(5, 4))};
  for (const auto& p : points) {
    std::set<std::string> found;
    for (int coset = 0; coset < 2; ++coset)
      for_each_lattice_in_box(3, [&](const LatticeElement& g) {
        if (coset == 0 && !g.element().is_identity())
          return;  // nontrivial translations move the x/y coordinates
        auto e = PiGroup::make(coset ? PiGroup::Coset::alpha_gamma : PiGroup::Coset::gamma, g);
        if (e.map(p) == p)
          found.insert(e.map.translation_part().str() + (coset ? "a" : "g"));
      });
    auto iso = isotropy_group(p);
    ASSERT_EQ(found.size(), iso.size()) << p.str();
    for (const auto& m : iso)
      EXPECT_EQ(m(p), p);
  }
}

TEST(FixedPoints, SingularSetReports)
{
  SingularSetReport r1 = singular_set_report(1), r2 = singular_set_report(2);
  EXPECT_TRUE(r1.passed());
  EXPECT_TRUE(r2.passed());
  EXPECT_EQ(r2.max_isotropy_order, 2);
  EXPECT_LT(r1.fixed_planes, r2.fixed_planes);
  EXPECT_EQ(admissible_plane_count(3), 7 * 7 * 7 * 6);
  EXPECT_THROW(singular_set_report(0), std::invalid_argument);
}

TEST(FixedPoints, BetaDiagnostics)
{
  BetaDiagnostics d = beta_diagnostics(2);
  EXPECT_TRUE(d.square_is_central_translation);
  EXPECT_TRUE(d.free_action());
  EXPECT_FALSE(d.linear_part.is_automorphism);
  EXPECT_GT(d.closure_failures, 0);
  EXPECT_FALSE(d.closure_holds_at_e_x1);
}

TEST(Suites, AllPassAtQuarterAndZero)
{
  for (const Rational& t : {q(1, 4), q(0), q(5, 4)}) {
    AlgebraConfig c;
    c.t = t;
    c.trials = 200;
    c.bound = 2;
    for (const auto& s : run_algebra_suites(c))
      EXPECT_TRUE(s.passed()) << s.name << " at t=" << to_string(t);
  }
}
