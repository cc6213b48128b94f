#pragma once

#include "orbispec/fixed_points.hpp"
#include "orbispec/geometry.hpp"
#include "orbispec/witness.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace orbispec {

/// Outcome of one exact check suite. Inapplicable suites pass vacuously and say why.
struct SuiteResult {
  std::string name;
  std::string invariant;
  long checks = 0;
  long failures = 0;
  bool applicable = true;
  std::string note;

  bool passed() const { return failures == 0 && (checks > 0 || !applicable); }
};

struct AlgebraConfig {
  Rational t = make_rational(1, 4);
  long trials = 1000;
  std::uint64_t seed = 42;
  long bound = 3;
};

inline SuiteResult group_axiom_suite(const AlgebraConfig& c)
{
  SuiteResult r{"group_axioms", "GroupElement: associativity, identity, two-sided inverse, central elements commute"};
  RationalSampler s(c.seed);
  const GroupElement e;
  for (long k = 0; k < c.trials; ++k) {
    GroupElement a = random_element(s), b = random_element(s), d = random_element(s);
    GroupElement z(0, 0, 0, 0, s(), s());
    r.checks += 5;
    r.failures += mul(mul(a, b), d) != mul(a, mul(b, d));
    r.failures += mul(e, a) != a || mul(a, e) != a;
    r.failures += mul(a, inverse(a)) != e;
    r.failures += mul(inverse(a), a) != e;
    r.failures += mul(z, a) != mul(a, z);
  }
  return r;
}

inline SuiteResult homomorphism_suite(const AlgebraConfig& c)
{
  SuiteResult r{"homomorphism", "Phi_t(ab) = Phi_t(a) Phi_t(b); basis-pair automorphism certificate"};
  RationalSampler s(c.seed + 1);
  r.checks += 1;
  r.failures += !is_automorphism(phi_t_map(c.t)).is_automorphism;
  for (long k = 0; k < c.trials; ++k) {
    GroupElement a = random_element(s), b = random_element(s);
    ++r.checks;
    r.failures += phi_t(c.t, mul(a, b)) != mul(phi_t(c.t, a), phi_t(c.t, b));
  }
  return r;
}

inline SuiteResult witness_suite(const AlgebraConfig& c)
{
  SuiteResult r{"witness", "almost_inner_witness: Phi_t(gamma) = a gamma a^-1 over the lattice box"};
  for_each_lattice_in_box(c.bound, [&](const LatticeElement& g) {
    WitnessCertificate w = almost_inner_witness(c.t, g);
    ++r.checks;
    bool ok = w.verified && w.a && conjugate(*w.a, g.element()) == phi_t(c.t, g.element());
    if (c.t == 0)
      ok = ok && w.a->is_identity();
    r.failures += !ok;
  });
  if (c.t == 0)
    r.note = "t = 0: every witness is the identity";
  return r;
}

inline SuiteResult twisted_witness_suite(const AlgebraConfig& c)
{
  SuiteResult r{"twisted_witness", "twisted_witness: extended Phi_t(alpha gamma) = a (alpha gamma) a^-1 as maps"};
  const AffineIsometry al = alpha();
  RationalSampler s(c.seed + 7);
  for_each_lattice_in_box(c.bound, [&](const LatticeElement& g) {
    WitnessCertificate w = twisted_witness(c.t, g);
    ++r.checks;
    bool ok = w.verified && w.a.has_value();
    if (ok) {
      // Re-check at a random rational point, outside the frame the solver used.
      const GroupElement x = random_element(s);
      const GroupElement lhs = mul(*w.a, al(mul(g.element(), mul(inverse(*w.a), x))));
      ok = lhs == al(mul(phi_t(c.t, g.element()), x));
    }
    r.failures += !ok;
  });
  return r;
}

inline SuiteResult non_inner_suite(const AlgebraConfig& c)
{
  SuiteResult r{"non_inner", "not_inner_certificate: contradictory constraints a1 = t and a1 = 0"};
  if (c.t == 0) {
    r.applicable = false;
    r.note = "t = 0: Phi_0 is the identity, which is inner";
    return r;
  }
  NonInnerCertificate cert = not_inner_certificate(c.t);
  r.checks = 1;
  r.failures = !(cert.valid() && cert.a1_forced_by_first == c.t && cert.a1_forced_by_second == 0);
  r.note = "a1 = " + to_string(cert.a1_forced_by_first) + " and a1 = " + to_string(cert.a1_forced_by_second);
  return r;
}

inline SuiteResult commutation_suite(const AlgebraConfig& c)
{
  SuiteResult r{"commutation", "alpha^2 = id, alpha Gamma alpha^-1 = Gamma, Phi_t o alpha = alpha o Phi_t"};
  const AffineMap a = alpha().as_affine();
  const AffineMap ainv = affine_inverse(a);
  const AffineMap phi = linear_as_affine(phi_t_map(c.t));
  r.checks += 2;
  r.failures += compose(a, a) != AffineMap{};
  r.failures += compose(phi, a) != compose(a, phi);
  RationalSampler s(c.seed + 2);
  for (long k = 0; k < c.trials; ++k) {
    GroupElement x = random_element(s);
    r.checks += 2;
    r.failures += a(a(x)) != x;
    r.failures += phi_t(c.t, a(x)) != a(phi_t(c.t, x));
  }
  for_each_lattice_in_box(std::min<long>(c.bound, 2), [&](const LatticeElement& g) {
    ++r.checks;
    auto img = as_left_translation(compose(compose(a, left_translation(g.element())), ainv));
    r.failures += !(img && img->is_lattice());
  });
  return r;
}

inline SuiteResult invariance_suite(const AlgebraConfig& c)
{
  SuiteResult r{"invariance", "g_t left-invariant, alpha an isometry of g_t, g_t = Phi_t^* g_0"};
  for (const CheckVerdict& v : {left_invariance_check(MetricFamily::almost_inner, c.t, c.trials, c.seed + 3),
                                alpha_isometry_check(MetricFamily::almost_inner, c.t, c.trials, c.seed + 4),
                                pullback_consistency_check(c.trials, c.seed + 5)}) {
    r.checks += v.trials;
    r.failures += v.failures;
  }
  return r;
}

inline SuiteResult displacement_suite(const AlgebraConfig& c)
{
  SuiteResult r{"displacement", "x^-1 Phi_t(gamma) x = (a^-1 x)^-1 gamma (a^-1 x) with the witness a"};
  RationalSampler s(c.seed + 6);
  for (long k = 0; k < c.trials; ++k) {
    LatticeElement g = random_lattice_element(s, c.bound);
    GroupElement x = random_element(s);
    ++r.checks;
    r.failures += !displacement_equivariance(c.t, g, x).verified;
  }
  return r;
}

inline SuiteResult lattice_reduction_suite(const AlgebraConfig& c)
{
  SuiteResult r{"lattice_reduction", "Phi_t(Gamma) = Phi_{t mod 1}(Gamma) over the lattice box"};
  LatticeReductionReport rep = lattice_reduction_check(c.t, std::min<long>(c.bound, 2));
  r.checks = rep.checked;
  r.failures = rep.failures;
  r.note = "t = " + to_string(c.t) + " reduces to " + to_string(rep.reduced);
  return r;
}

inline std::vector<SuiteResult> run_algebra_suites(const AlgebraConfig& c)
{
  return {group_axiom_suite(c),   homomorphism_suite(c), witness_suite(c),     twisted_witness_suite(c),
          non_inner_suite(c),     commutation_suite(c),  invariance_suite(c), displacement_suite(c),
          lattice_reduction_suite(c)};
}

} // namespace orbispec
