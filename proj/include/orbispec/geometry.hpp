#pragma once

#include "orbispec/transforms.hpp"
#include "orbispec/witness.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace orbispec {

template <class T>
using Mat6 = std::array<std::array<T, kDim>, kDim>;

template <class T>
using Vec6 = std::array<T, kDim>;

/**
 * Left-invariant metric families on G, all written through a unit lower
 * triangular coframe C so that g = C^T C and det g = 1.
 *
 *  almost_inner  row z1 = dz1 - x1 dy1 - x2 dy2,  row z2 = dz2 + (t - x1) dy2
 *                (the pullback of the t = 0 metric by Phi_t)
 *  control       row z1 as above,                  row z2 = dz2 + s dy1 - x1 dy2
 *                (pullback by z2 <- z2 + s y1, an automorphism that is not almost inner)
 *  flat          identity coframe
 */
enum class MetricFamily { almost_inner, control, flat };

inline std::string to_string(MetricFamily f)
{
  switch (f) {
  case MetricFamily::almost_inner: return "almost-inner";
  case MetricFamily::control: return "control";
  case MetricFamily::flat: return "flat";
  }
  return "?";
}

inline MetricFamily parse_family(const std::string& s)
{
  if (s == "almost-inner")
    return MetricFamily::almost_inner;
  if (s == "control")
    return MetricFamily::control;
  if (s == "flat")
    return MetricFamily::flat;
  throw std::invalid_argument("unknown metric family: " + s);
}

template <class T>
Mat6<T> identity_mat()
{
  Mat6<T> m{};
  for (int i = 0; i < kDim; ++i)
    m[i][i] = T(1);
  return m;
}

/// Coframe rows in coordinate order; entries depend only on (x1, x2, param).
template <class T>
Mat6<T> coframe(MetricFamily family, const T& param, const Vec6<T>& p)
{
  Mat6<T> c = identity_mat<T>();
  if (family == MetricFamily::flat)
    return c;
  c[Z1][Y1] = -p[X1];
  c[Z1][Y2] = -p[X2];
  if (family == MetricFamily::almost_inner) {
    c[Z2][Y2] = param - p[X1];
  } else {
    c[Z2][Y1] = param;
    c[Z2][Y2] = -p[X1];
  }
  return c;
}

template <class T>
Mat6<T> transpose(const Mat6<T>& a)
{
  Mat6<T> t{};
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      t[j][i] = a[i][j];
  return t;
}

template <class T>
Mat6<T> multiply(const Mat6<T>& a, const Mat6<T>& b)
{
  Mat6<T> c{};
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) {
      T s(0);
      for (int k = 0; k < kDim; ++k)
        s += a[i][k] * b[k][j];
      c[i][j] = s;
    }
  return c;
}

/// Inverse of a unit lower triangular matrix by forward substitution.
template <class T>
Mat6<T> unit_lower_inverse(const Mat6<T>& c)
{
  Mat6<T> inv{};
  for (int j = 0; j < kDim; ++j) {
    inv[j][j] = T(1);
    for (int i = j + 1; i < kDim; ++i) {
      T s(0);
      for (int k = j; k < i; ++k)
        s += c[i][k] * inv[k][j];
      inv[i][j] = -s;
    }
  }
  return inv;
}

template <class T>
Mat6<T> metric(MetricFamily family, const T& param, const Vec6<T>& p)
{
  Mat6<T> c = coframe(family, param, p);
  return multiply(transpose(c), c);
}

template <class T>
Mat6<T> inverse_metric(MetricFamily family, const T& param, const Vec6<T>& p)
{
  Mat6<T> ci = unit_lower_inverse(coframe(family, param, p));
  return multiply(ci, transpose(ci));
}

inline Mat6<Rational> to_mat(const Matrix6& m)
{
  Mat6<Rational> out{};
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      out[i][j] = m[i][j];
  return out;
}

inline Vec6<Rational> to_vec(const GroupElement& g) { return g.coords(); }

/// J^T g(q) J, the pullback of the metric at q through a map with Jacobian J.
inline Mat6<Rational> pullback(const Mat6<Rational>& jac, const Mat6<Rational>& g)
{
  return multiply(transpose(jac), multiply(g, jac));
}

/// Exact determinant of the metric, which is 1 for every family.
inline Rational metric_determinant(MetricFamily family, const Rational& param, const GroupElement& p)
{
  RationalMatrix m(kDim, kDim);
  auto g = metric(family, param, to_vec(p));
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      m(i, j) = g[i][j];
  return determinant(m);
}

struct CheckVerdict {
  std::string name;
  long trials = 0;
  long failures = 0;
  bool passed() const { return trials > 0 && failures == 0; }
};

/// J_L^T g(a p) J_L = g(p) for random rational a, p; J_L is the Jacobian of h -> a h.
inline CheckVerdict left_invariance_check(MetricFamily family, const Rational& param, long trials,
                                          std::uint64_t seed)
{
  if (trials < 1)
    throw std::invalid_argument("trials must be >= 1");
  CheckVerdict v{"left_invariance", 0, 0};
  RationalSampler s(seed);
  for (long k = 0; k < trials; ++k) {
    GroupElement a = k == 0 ? GroupElement() : random_element(s);
    GroupElement p = random_element(s);
    Mat6<Rational> jac = to_mat(left_translation(a).linear);
    ++v.trials;
    if (pullback(jac, metric(family, param, to_vec(mul(a, p)))) != metric(family, param, to_vec(p)))
      ++v.failures;
  }
  return v;
}

/// m^* g = g at random rational points, for an affine map m (constant Jacobian).
inline CheckVerdict isometry_check(MetricFamily family, const Rational& param, const AffineMap& m, long trials,
                                   std::uint64_t seed, std::string name = "isometry")
{
  if (trials < 1)
    throw std::invalid_argument("trials must be >= 1");
  CheckVerdict v{std::move(name), 0, 0};
  RationalSampler s(seed);
  Mat6<Rational> jac = to_mat(m.linear);
  for (long k = 0; k < trials; ++k) {
    GroupElement p = random_element(s);
    ++v.trials;
    if (pullback(jac, metric(family, param, to_vec(m(p)))) != metric(family, param, to_vec(p)))
      ++v.failures;
  }
  return v;
}

inline CheckVerdict alpha_isometry_check(MetricFamily family, const Rational& param, long trials, std::uint64_t seed)
{
  return isometry_check(family, param, alpha().as_affine(), trials, seed, "alpha_isometry");
}

inline CheckVerdict beta_isometry_check(MetricFamily family, const Rational& param, long trials, std::uint64_t seed)
{
  return isometry_check(family, param, beta().as_affine(), trials, seed, "beta_isometry");
}

/// g_t(p) = J_Phi^T g_0(Phi_t p) J_Phi for random (t, p).
inline CheckVerdict pullback_consistency_check(long trials, std::uint64_t seed)
{
  CheckVerdict v{"pullback_consistency", 0, 0};
  RationalSampler s(seed);
  for (long k = 0; k < trials; ++k) {
    Rational t = s();
    GroupElement p = random_element(s);
    Mat6<Rational> jac = to_mat(phi_t_map(t).matrix());
    auto lhs = metric(MetricFamily::almost_inner, t, to_vec(p));
    auto rhs = pullback(jac, metric(MetricFamily::almost_inner, Rational(0), to_vec(phi_t(t, p))));
    ++v.trials;
    if (lhs != rhs)
      ++v.failures;
  }
  return v;
}

/// Coordinate norm of x^{-1} gamma x.
inline double displacement(const GroupElement& gamma, const GroupElement& x)
{
  GroupElement d = mul(mul(inverse(x), gamma), x);
  double s = 0;
  for (int i = 0; i < kDim; ++i) {
    double v = d[i].get_d();
    s += v * v;
  }
  return std::sqrt(s);
}

struct DisplacementCheck {
  GroupElement lhs;  // x^{-1} Phi_t(gamma) x
  GroupElement rhs;  // (a^{-1} x)^{-1} gamma (a^{-1} x)
  GroupElement witness;
  bool verified = false;
};

/**
 * With a the almost-inner witness at gamma, x^{-1} Phi_t(gamma) x and
 * (a^{-1}x)^{-1} gamma (a^{-1}x) agree coordinatewise, so the displacement
 * of Phi_t(gamma) at x equals that of gamma at a^{-1} x.
 */
inline DisplacementCheck displacement_equivariance(const Rational& t, const LatticeElement& gamma,
                                                   const GroupElement& x)
{
  WitnessCertificate w = almost_inner_witness(t, gamma);
  if (!w.verified || !w.a)
    throw std::logic_error("no verified witness at " + gamma.element().str());
  DisplacementCheck c;
  c.witness = *w.a;
  GroupElement y = mul(inverse(*w.a), x);
  c.lhs = mul(mul(inverse(x), phi_t(t, gamma.element())), x);
  c.rhs = mul(mul(inverse(y), gamma.element()), y);
  c.verified = c.lhs == c.rhs;
  return c;
}

} // namespace orbispec
