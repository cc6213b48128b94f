#pragma once

#include "orbispec/exact_linalg.hpp"
#include "orbispec/group.hpp"

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace orbispec {

using Matrix6 = std::array<std::array<Rational, kDim>, kDim>;

inline Matrix6 identity6()
{
  Matrix6 m{};
  for (int i = 0; i < kDim; ++i)
    m[i][i] = 1;
  return m;
}

inline Matrix6 diag6(std::array<long, kDim> d)
{
  Matrix6 m{};
  for (int i = 0; i < kDim; ++i)
    m[i][i] = d[i];
  return m;
}

inline Matrix6 matmul(const Matrix6& a, const Matrix6& b)
{
  Matrix6 c{};
  for (int i = 0; i < kDim; ++i)
    for (int k = 0; k < kDim; ++k) {
      if (sgn(a[i][k]) == 0)
        continue;
      for (int j = 0; j < kDim; ++j)
        if (sgn(b[k][j]) != 0)
          c[i][j] += a[i][k] * b[k][j];
    }
  return c;
}

inline GroupElement matvec(const Matrix6& a, const GroupElement& v)
{
  std::array<Rational, kDim> out{};
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      if (sgn(a[i][j]) != 0 && sgn(v[j]) != 0)
        out[i] += a[i][j] * v[j];
  return GroupElement(out);
}

inline RationalMatrix to_matrix(const Matrix6& a)
{
  RationalMatrix m(kDim, kDim);
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      m(i, j) = a[i][j];
  return m;
}

inline Matrix6 from_matrix(const RationalMatrix& m)
{
  if (m.rows() != kDim || m.cols() != kDim)
    throw std::invalid_argument("expected a 6x6 matrix");
  Matrix6 a{};
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      a[i][j] = m(i, j);
  return a;
}

inline GroupElement basis_element(int i)
{
  GroupElement e;
  e[i] = 1;
  return e;
}

/**
 * An invertible linear map on the coordinate space of G. Whether it is a
 * group automorphism is a separate, certified property.
 */
class LinearCoordinateMap {
public:
  /// The identity, which is trivially an automorphism.
  LinearCoordinateMap() : m_(identity6()), name_("id"), verified_(true) {}

  explicit LinearCoordinateMap(Matrix6 m, std::string name = {}) : m_(std::move(m)), name_(std::move(name))
  {
    if (determinant(to_matrix(m_)) == 0)
      throw std::invalid_argument("linear coordinate map is singular");
  }

  const Matrix6& matrix() const { return m_; }
  const std::string& name() const { return name_; }
  bool automorphism_verified() const { return verified_; }

  GroupElement operator()(const GroupElement& x) const { return matvec(m_, x); }

  LinearCoordinateMap inverse() const
  {
    auto inv = orbispec::inverse(to_matrix(m_));
    LinearCoordinateMap out(from_matrix(*inv), name_.empty() ? name_ : name_ + "^-1");
    out.verified_ = verified_;
    return out;
  }

  friend LinearCoordinateMap compose(const LinearCoordinateMap& a, const LinearCoordinateMap& b)
  {
    LinearCoordinateMap out(matmul(a.m_, b.m_));
    out.verified_ = a.verified_ && b.verified_;
    return out;
  }

  friend bool operator==(const LinearCoordinateMap& a, const LinearCoordinateMap& b) { return a.m_ == b.m_; }

private:
  friend LinearCoordinateMap mark_verified(LinearCoordinateMap);

  Matrix6 m_;
  std::string name_;
  bool verified_ = false;
};

inline LinearCoordinateMap mark_verified(LinearCoordinateMap f)
{
  f.verified_ = true;
  return f;
}

/// One failing basis pair of the homomorphism test.
struct AutomorphismDefect {
  int i = 0;
  int j = 0;
  GroupElement lhs;  // F(e_i e_j)
  GroupElement rhs;  // F(e_i) F(e_j)
};

struct AutomorphismCertificate {
  bool is_automorphism = false;
  std::vector<AutomorphismDefect> defects;
};

/**
 * Decides whether F is a group automorphism. The defect F(ab) - F(a)F(b)
 * is bilinear in (a, b) for linear F and this quadratic group law, so it
 * vanishes identically iff it vanishes on the 36 basis pairs.
 */
inline AutomorphismCertificate is_automorphism(const LinearCoordinateMap& f)
{
  AutomorphismCertificate cert;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) {
      GroupElement ei = basis_element(i), ej = basis_element(j);
      GroupElement lhs = f(mul(ei, ej));
      GroupElement rhs = mul(f(ei), f(ej));
      if (!(lhs == rhs))
        cert.defects.push_back({i, j, lhs, rhs});
    }
  cert.is_automorphism = cert.defects.empty();
  return cert;
}

/// Returns f flagged as a verified automorphism, or throws.
inline LinearCoordinateMap certify_automorphism(const LinearCoordinateMap& f)
{
  if (!is_automorphism(f).is_automorphism)
    throw std::invalid_argument("map is not an automorphism of G: " + f.name());
  return mark_verified(f);
}

inline LinearCoordinateMap phi_t_map(const Rational& t)
{
  Matrix6 m = identity6();
  m[Z2][Y2] = t;
  return LinearCoordinateMap(m, "Phi_" + t.get_str());
}

/// Linear part of the involution alpha.
inline LinearCoordinateMap phi_alpha_map() { return LinearCoordinateMap(diag6({1, 1, -1, -1, -1, -1}), "phi_alpha"); }

/// Linear part of beta; not an automorphism of G.
inline LinearCoordinateMap phi_beta_map() { return LinearCoordinateMap(diag6({1, 1, 1, 1, -1, 1}), "phi_beta"); }

/// The control automorphism z2 <- z2 + s y1.
inline LinearCoordinateMap psi_s_map(const Rational& s)
{
  Matrix6 m = identity6();
  m[Z2][Y1] = s;
  return LinearCoordinateMap(m, "Psi_" + s.get_str());
}

/// A general affine map x -> A x + b of the coordinate space.
struct AffineMap {
  Matrix6 linear = identity6();
  GroupElement translation;

  GroupElement operator()(const GroupElement& x) const
  {
    GroupElement y = matvec(linear, x);
    std::array<Rational, kDim> c{};
    for (int i = 0; i < kDim; ++i)
      c[i] = y[i] + translation[i];
    return GroupElement(c);
  }

  friend bool operator==(const AffineMap& a, const AffineMap& b)
  {
    return a.linear == b.linear && a.translation == b.translation;
  }
};

/// (a o b)(x) = a(b(x)).
inline AffineMap compose(const AffineMap& a, const AffineMap& b)
{
  AffineMap c;
  c.linear = matmul(a.linear, b.linear);
  c.translation = a(b.translation);
  return c;
}

inline AffineMap affine_inverse(const AffineMap& a)
{
  auto inv = inverse(to_matrix(a.linear));
  if (!inv)
    throw std::invalid_argument("affine map is not invertible");
  AffineMap out;
  out.linear = from_matrix(*inv);
  GroupElement t = matvec(out.linear, a.translation);
  std::array<Rational, kDim> c{};
  for (int i = 0; i < kDim; ++i)
    c[i] = -t[i];
  out.translation = GroupElement(c);
  return out;
}

/// Left translation h -> w h, which is affine in h.
inline AffineMap left_translation(const GroupElement& w)
{
  AffineMap m;
  m.linear[Z1][Y1] = w[X1];
  m.linear[Z1][Y2] = w[X2];
  m.linear[Z2][Y2] = w[X1];
  m.translation = w;
  return m;
}

inline AffineMap linear_as_affine(const LinearCoordinateMap& f)
{
  AffineMap m;
  m.linear = f.matrix();
  return m;
}

/// The affine map is a left translation L_c for some c, returned if so.
inline std::optional<GroupElement> as_left_translation(const AffineMap& m)
{
  const GroupElement& c = m.translation;  // L_c(e) = c
  if (left_translation(c) == m)
    return c;
  return std::nullopt;
}

/**
 * An element (phi, w) of Aut(G) x| G acting by h -> w phi(h). The semidirect
 * product law (phi, w)(phi', w') = (phi phi', w phi(w')) is used only when
 * both linear parts are verified automorphisms; otherwise compose the
 * underlying affine maps directly.
 */
class AffineIsometry {
public:
  AffineIsometry() = default;
  AffineIsometry(LinearCoordinateMap linear, GroupElement translation)
    : phi_(std::move(linear)), w_(std::move(translation))
  {}

  static AffineIsometry translation(const GroupElement& w) { return {LinearCoordinateMap(), w}; }

  const LinearCoordinateMap& linear() const { return phi_; }
  const GroupElement& translation_part() const { return w_; }

  GroupElement operator()(const GroupElement& h) const { return mul(w_, phi_(h)); }

  AffineMap as_affine() const { return compose(left_translation(w_), linear_as_affine(phi_)); }

  friend AffineIsometry operator*(const AffineIsometry& a, const AffineIsometry& b)
  {
    if (!a.phi_.automorphism_verified() || !b.phi_.automorphism_verified())
      throw std::logic_error("semidirect product law needs verified automorphisms");
    return {compose(a.phi_, b.phi_), mul(a.w_, a.phi_(b.w_))};
  }

  AffineIsometry inv() const
  {
    if (!phi_.automorphism_verified())
      throw std::logic_error("semidirect inverse needs a verified automorphism");
    LinearCoordinateMap pinv = phi_.inverse();
    return {pinv, pinv(inverse(w_))};
  }

  bool same_transformation(const AffineIsometry& other) const { return as_affine() == other.as_affine(); }

  friend bool operator==(const AffineIsometry& a, const AffineIsometry& b)
  {
    return a.phi_ == b.phi_ && a.w_ == b.w_;
  }

private:
  LinearCoordinateMap phi_;
  GroupElement w_;
};

/// alpha: (x, y, z) -> (x1, x2, -y1, -y2, -z1, -z2 + 1/2).
inline AffineIsometry alpha()
{
  static const AffineIsometry a{certify_automorphism(phi_alpha_map()),
                                GroupElement(0, 0, 0, 0, 0, make_rational(1, 2))};
  return a;
}

/// beta: (x, y, z) -> (x1, x2, y1, y2, -z1, z2 + 1/2); linear part is not verified.
inline AffineIsometry beta()
{
  return {phi_beta_map(), GroupElement(0, 0, 0, 0, 0, make_rational(1, 2))};
}

inline AffineIsometry identity_isometry() { return {}; }

/// Lattice translation (id, gamma).
inline AffineIsometry gamma_isometry(const LatticeElement& g) { return AffineIsometry::translation(g.element()); }

/// The two-coset group Pi = Gamma cup alpha Gamma inside Aut(G) x| G.
class PiGroup {
public:
  enum class Coset { gamma, alpha_gamma };

  struct Element {
    Coset coset;
    LatticeElement gamma;
    AffineIsometry map;
  };

  static Element make(Coset coset, const LatticeElement& g)
  {
    if (coset == Coset::gamma)
      return {coset, g, gamma_isometry(g)};
    return {coset, g, alpha() * gamma_isometry(g)};
  }

  /// Coset membership of an arbitrary affine isometry, with its Gamma label.
  static std::optional<Element> classify(const AffineIsometry& m)
  {
    if (m.linear() == LinearCoordinateMap()) {
      if (!m.translation_part().is_lattice())
        return std::nullopt;
      return make(Coset::gamma, LatticeElement(m.translation_part()));
    }
    if (m.linear() == phi_alpha_map()) {
      // alpha (id, g) = (phi_a, w_a phi_a(g)), so g = phi_a^{-1}(w_a^{-1} w).
      GroupElement g = phi_alpha_map().inverse()(mul(inverse(alpha().translation_part()), m.translation_part()));
      if (!g.is_lattice())
        return std::nullopt;
      return make(Coset::alpha_gamma, LatticeElement(g));
    }
    return std::nullopt;
  }
};

} // namespace orbispec
