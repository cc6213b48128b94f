#pragma once

#include "orbispec/transforms.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace orbispec {

/// Exact fixed-point set of an affine map: empty, or point + span(directions).
struct FixedPointSolution {
  bool empty = true;
  GroupElement point;
  std::vector<int> free_coordinates;
  std::vector<GroupElement> directions;

  /// The solution is {x1, x2 free; y1, y2, z1, z2 fixed}.
  bool is_x_plane() const
  {
    if (empty || directions.size() != 2)
      return false;
    return directions[0] == basis_element(X1) && directions[1] == basis_element(X2);
  }

  /// (y1, y2, z1, z2) of an x-plane.
  std::array<Rational, 4> plane_values() const { return {point[Y1], point[Y2], point[Z1], point[Z2]}; }

  /// Point of the solution set with the given parameters along the directions.
  GroupElement sample(const std::vector<Rational>& params) const
  {
    GroupElement p = point;
    for (std::size_t k = 0; k < directions.size() && k < params.size(); ++k)
      for (int i = 0; i < kDim; ++i)
        p[i] += params[k] * directions[k][i];
    for (int i = 0; i < kDim; ++i)
      p[i].canonicalize();
    return p;
  }
};

/// Solves m(x) = x exactly.
inline FixedPointSolution fixed_points(const AffineMap& m)
{
  RationalMatrix sys(kDim, kDim);
  std::vector<Rational> rhs(kDim);
  for (int i = 0; i < kDim; ++i) {
    for (int j = 0; j < kDim; ++j)
      sys(i, j) = m.linear[i][j] - (i == j ? 1 : 0);
    rhs[i] = -m.translation[i];
  }
  auto sol = solve_linear(sys, rhs);
  FixedPointSolution out;
  if (!sol.consistent)
    return out;
  out.empty = false;
  out.point = GroupElement(std::array<Rational, kDim>{sol.particular[0], sol.particular[1], sol.particular[2],
                                                      sol.particular[3], sol.particular[4], sol.particular[5]});
  out.free_coordinates = sol.free_variables;
  for (const auto& k : sol.kernel)
    out.directions.push_back(GroupElement(std::array<Rational, kDim>{k[0], k[1], k[2], k[3], k[4], k[5]}));
  return out;
}

inline FixedPointSolution fixed_points(const AffineIsometry& m) { return fixed_points(m.as_affine()); }

/**
 * Stabilizer of x in Pi. Besides the identity the only candidate is
 * (phi_alpha, (0, 0, 2y1, 2y2, 2z1, 2z2)), which belongs to Pi exactly when
 * 2y1, 2y2, 2z1 are integers and 2z2 is an integer plus one half.
 */
inline std::vector<AffineIsometry> isotropy_group(const GroupElement& x)
{
  std::vector<AffineIsometry> out{identity_isometry()};
  const Rational two = 2;
  Rational w3 = two * x.y1(), w4 = two * x.y2(), w5 = two * x.z1(), w6 = two * x.z2();
  if (is_integer(w3) && is_integer(w4) && is_integer(w5) && is_half_odd(w6)) {
    AffineIsometry cand(alpha().linear(), GroupElement(0, 0, w3, w4, w5, w6));
    if (cand(x) == x)
      out.push_back(std::move(cand));
  }
  return out;
}

/// y1, y2, z1 in Z/2 and z2 in Z/2 + 1/4.
inline bool in_singular_characterization(const std::array<Rational, 4>& v)
{
  const Rational two = 2;
  return is_integer(two * v[0]) && is_integer(two * v[1]) && is_integer(two * v[2]) && is_half_odd(two * v[3]);
}

struct SingularSetReport {
  long bound = 0;
  long elements_enumerated = 0;
  long fixed_planes = 0;
  long admissible_planes = 0;
  long characterization_violations = 0;  // fixed sets that are not admissible x-planes
  long missing_planes = 0;               // admissible planes in range never produced
  long isotropy_failures = 0;            // wrong stabilizer, or a non-involutive one
  int max_isotropy_order = 0;
  bool alpha_fixes_reference_point = false;

  bool passed() const
  {
    return characterization_violations == 0 && missing_planes == 0 && isotropy_failures == 0 &&
           max_isotropy_order <= 2 && alpha_fixes_reference_point && fixed_planes == admissible_planes;
  }
};

/// Number of admissible (w3, w4, w5, w6) with w3..w5 in Z and w6 in Z + 1/2, all in [-bound, bound].
inline long admissible_plane_count(long bound) { return (2 * bound + 1) * (2 * bound + 1) * (2 * bound + 1) * (2 * bound); }

/**
 * Enumerates every element of alpha Gamma whose translation part lies in
 * [-bound, bound]^6, solves its fixed-point set, and checks it both ways
 * against the closed-form description of the singular set.
 */
inline SingularSetReport singular_set_report(long bound)
{
  if (bound < 1)
    throw std::invalid_argument("singular_set_report needs bound >= 1");
  SingularSetReport rep;
  rep.bound = bound;
  rep.admissible_planes = admissible_plane_count(bound);

  using Key = std::tuple<Rational, Rational, Rational, Rational>;
  std::set<Key> produced;
  const Rational half = make_rational(1, 2);

  for (long w1 = -bound; w1 <= bound; ++w1)
    for (long w2 = -bound; w2 <= bound; ++w2)
      for (long w3 = -bound; w3 <= bound; ++w3)
        for (long w4 = -bound; w4 <= bound; ++w4)
          for (long w5 = -bound; w5 <= bound; ++w5)
            for (long n6 = -bound; n6 < bound; ++n6) {
              Rational w6 = Rational(n6) + half;
              AffineIsometry m(alpha().linear(), GroupElement(w1, w2, w3, w4, w5, w6));
              auto cls = PiGroup::classify(m);
              if (!cls || cls->coset != PiGroup::Coset::alpha_gamma) {
                ++rep.characterization_violations;
                continue;
              }
              ++rep.elements_enumerated;
              FixedPointSolution fp = fixed_points(m);
              if (fp.empty)
                continue;
              ++rep.fixed_planes;
              if (!fp.is_x_plane() || !in_singular_characterization(fp.plane_values())) {
                ++rep.characterization_violations;
                continue;
              }
              auto v = fp.plane_values();
              produced.emplace(v[0], v[1], v[2], v[3]);

              GroupElement p = fp.sample({make_rational(1, 3), make_rational(-2, 7)});
              auto iso = isotropy_group(p);
              rep.max_isotropy_order = std::max<int>(rep.max_isotropy_order, static_cast<int>(iso.size()));
              bool ok = iso.size() == 2 && iso[1] == m && m(p) == p;
              if (ok) {
                AffineMap sq = compose(iso[1].as_affine(), iso[1].as_affine());
                ok = sq == AffineMap{};
              }
              if (!ok)
                ++rep.isotropy_failures;
            }

  for (long a = -bound; a <= bound; ++a)
    for (long b = -bound; b <= bound; ++b)
      for (long c = -bound; c <= bound; ++c)
        for (long n = -bound; n < bound; ++n) {
          Key k{make_rational(a, 2), make_rational(b, 2), make_rational(c, 2), (Rational(n) + half) / 2};
          if (!produced.count(k))
            ++rep.missing_planes;
        }

  GroupElement ref(0, 0, 0, 0, 0, make_rational(1, 4));
  rep.alpha_fixes_reference_point = alpha()(ref) == ref;
  return rep;
}

/**
 * Computed facts about beta. Nothing here asserts an interpretation; the
 * caller decides what to gate on.
 */
struct BetaDiagnostics {
  long bound = 0;
  bool square_is_central_translation = false;  // beta o beta = L_(0,0,0,0,0,1)
  long fixed_point_searches = 0;
  long maps_with_fixed_points = 0;             // over x -> beta(gamma x), gamma in the box
  AutomorphismCertificate linear_part;
  long closure_checks = 0;
  long closure_failures = 0;                   // beta L_gamma beta^{-1} not a left translation
  bool closure_holds_at_e_x1 = true;

  bool free_action() const { return maps_with_fixed_points == 0; }
};

inline BetaDiagnostics beta_diagnostics(long bound)
{
  BetaDiagnostics d;
  d.bound = bound;
  const AffineMap b = beta().as_affine();
  const AffineMap binv = affine_inverse(b);

  d.square_is_central_translation = compose(b, b) == left_translation(GroupElement(0, 0, 0, 0, 0, 1));
  d.linear_part = is_automorphism(phi_beta_map());

  for_each_lattice_in_box(bound, [&](const LatticeElement& g) {
    AffineMap lg = left_translation(g.element());
    ++d.fixed_point_searches;
    if (!fixed_points(compose(b, lg)).empty)
      ++d.maps_with_fixed_points;
    ++d.closure_checks;
    if (!as_left_translation(compose(compose(b, lg), binv)))
      ++d.closure_failures;
  });

  d.closure_holds_at_e_x1 =
      as_left_translation(compose(compose(b, left_translation(basis_element(X1))), binv)).has_value();
  return d;
}

} // namespace orbispec
