#pragma once

#include "orbispec/rational.hpp"

#include <array>
#include <ostream>
#include <stdexcept>
#include <string>

namespace orbispec {

/// Coordinate slots of a point of G, in storage order.
enum Coord : int { X1 = 0, X2 = 1, Y1 = 2, Y2 = 3, Z1 = 4, Z2 = 5 };

inline constexpr int kDim = 6;

/**
 * A point of the 2-step nilpotent group G = R^6 with product
 *
 *   (x,y,z)(x',y',z') = (x+x', y+y', z1+z1'+x1 y1'+x2 y2', z2+z2'+x1 y2').
 *
 * The z-coordinates span the center.
 */
class GroupElement {
public:
  GroupElement() = default;

  GroupElement(Rational x1, Rational x2, Rational y1, Rational y2, Rational z1, Rational z2)
    : c_{std::move(x1), std::move(x2), std::move(y1), std::move(y2), std::move(z1), std::move(z2)}
  {
    for (auto& v : c_)
      v.canonicalize();
  }

  explicit GroupElement(const std::array<Rational, kDim>& c) : c_(c)
  {
    for (auto& v : c_)
      v.canonicalize();
  }

  static GroupElement identity() { return {}; }

  static GroupElement from_ints(long x1, long x2, long y1, long y2, long z1, long z2)
  {
    return {Rational(x1), Rational(x2), Rational(y1), Rational(y2), Rational(z1), Rational(z2)};
  }

  const Rational& operator[](int i) const { return c_[i]; }
  Rational& operator[](int i) { return c_[i]; }

  const Rational& x1() const { return c_[X1]; }
  const Rational& x2() const { return c_[X2]; }
  const Rational& y1() const { return c_[Y1]; }
  const Rational& y2() const { return c_[Y2]; }
  const Rational& z1() const { return c_[Z1]; }
  const Rational& z2() const { return c_[Z2]; }

  const std::array<Rational, kDim>& coords() const { return c_; }

  bool is_identity() const
  {
    for (const auto& v : c_)
      if (v != 0)
        return false;
    return true;
  }

  bool is_central() const { return c_[X1] == 0 && c_[X2] == 0 && c_[Y1] == 0 && c_[Y2] == 0; }

  /// All six coordinates are integers, i.e. the element lies in the lattice.
  bool is_lattice() const
  {
    for (const auto& v : c_)
      if (!is_integer(v))
        return false;
    return true;
  }

  friend bool operator==(const GroupElement& a, const GroupElement& b) { return a.c_ == b.c_; }

  std::array<double, kDim> to_doubles() const
  {
    std::array<double, kDim> out{};
    for (int i = 0; i < kDim; ++i)
      out[i] = c_[i].get_d();
    return out;
  }

  std::string str() const
  {
    std::string s = "(";
    for (int i = 0; i < kDim; ++i) {
      if (i)
        s += ",";
      s += c_[i].get_str();
    }
    return s + ")";
  }

  friend std::ostream& operator<<(std::ostream& os, const GroupElement& g) { return os << g.str(); }

private:
  std::array<Rational, kDim> c_{};
};

inline GroupElement mul(const GroupElement& a, const GroupElement& b)
{
  return {a[X1] + b[X1],
          a[X2] + b[X2],
          a[Y1] + b[Y1],
          a[Y2] + b[Y2],
          a[Z1] + b[Z1] + a[X1] * b[Y1] + a[X2] * b[Y2],
          a[Z2] + b[Z2] + a[X1] * b[Y2]};
}

inline GroupElement operator*(const GroupElement& a, const GroupElement& b) { return mul(a, b); }

inline GroupElement inverse(const GroupElement& a)
{
  return {-a[X1],
          -a[X2],
          -a[Y1],
          -a[Y2],
          -a[Z1] + a[X1] * a[Y1] + a[X2] * a[Y2],
          -a[Z2] + a[X1] * a[Y2]};
}

/// a x a^{-1}. Only the central coordinates move.
inline GroupElement conjugate(const GroupElement& a, const GroupElement& x)
{
  return {x[X1],
          x[X2],
          x[Y1],
          x[Y2],
          x[Z1] + a[X1] * x[Y1] + a[X2] * x[Y2] - x[X1] * a[Y1] - x[X2] * a[Y2],
          x[Z2] + a[X1] * x[Y2] - x[X1] * a[Y2]};
}

/// The deformation automorphism z2 <- z2 + t y2.
inline GroupElement phi_t(const Rational& t, const GroupElement& x)
{
  GroupElement out = x;
  out[Z2] = x[Z2] + t * x[Y2];
  return out;
}

/// Inverse of phi_t, which is phi_{-t}.
inline GroupElement phi_t_inverse(const Rational& t, const GroupElement& x) { return phi_t(-t, x); }

/// A group element constrained to integer coordinates.
class LatticeElement {
public:
  explicit LatticeElement(GroupElement g) : g_(std::move(g))
  {
    if (!g_.is_lattice())
      throw std::invalid_argument("not a lattice element: " + g_.str());
  }

  static LatticeElement from_ints(long x1, long x2, long y1, long y2, long z1, long z2)
  {
    return LatticeElement(GroupElement::from_ints(x1, x2, y1, y2, z1, z2));
  }

  const GroupElement& element() const { return g_; }
  operator const GroupElement&() const { return g_; }

  friend LatticeElement operator*(const LatticeElement& a, const LatticeElement& b)
  {
    return LatticeElement(mul(a.g_, b.g_));
  }
  friend bool operator==(const LatticeElement& a, const LatticeElement& b) { return a.g_ == b.g_; }

  LatticeElement inv() const { return LatticeElement(inverse(g_)); }

private:
  GroupElement g_;
};

/// Calls fn(LatticeElement) for every element of [-bound, bound]^6 cap Z^6.
template <class Fn>
void for_each_lattice_in_box(long bound, Fn&& fn)
{
  std::array<long, kDim> v{};
  v.fill(-bound);
  while (true) {
    fn(LatticeElement::from_ints(v[0], v[1], v[2], v[3], v[4], v[5]));
    int i = 0;
    while (i < kDim && v[i] == bound) {
      v[i] = -bound;
      ++i;
    }
    if (i == kDim)
      return;
    ++v[i];
  }
}

/// Uniform random point with small-height rational coordinates.
inline GroupElement random_element(RationalSampler& s)
{
  return {s(), s(), s(), s(), s(), s()};
}

inline LatticeElement random_lattice_element(RationalSampler& s, long bound)
{
  return LatticeElement::from_ints(s.integer(-bound, bound), s.integer(-bound, bound),
                                   s.integer(-bound, bound), s.integer(-bound, bound),
                                   s.integer(-bound, bound), s.integer(-bound, bound));
}

} // namespace orbispec
