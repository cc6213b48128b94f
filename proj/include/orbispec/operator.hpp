#pragma once

#include "orbispec/geometry.hpp"
#include "orbispec/grid.hpp"
#include "orbispec/sparse.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace orbispec {

/// Which metric family and parameter the discrete Laplacian is built from.
struct Scheme {
  static constexpr int version = 1;

  MetricFamily family = MetricFamily::almost_inner;
  double param = 0;  // t for almost_inner, s for control, unused for flat

  Wrap wrap() const { return family == MetricFamily::flat ? Wrap::plain : Wrap::shear; }

  std::string str() const { return to_string(family) + "(" + std::to_string(param) + ")"; }
};

inline void require_even_grid(int n)
{
  if (n < 4)
    throw std::invalid_argument("grid needs N >= 4, got " + std::to_string(n));
  if (n % 2 != 0)
    throw std::invalid_argument("grid needs even N so that the half shift of alpha is N/2 steps; got N=" +
                                std::to_string(n) + ", use N=" + std::to_string(n + 1));
}

/**
 * -div(g^{-1} grad u) on the shear-periodic grid, with det g = 1.
 *
 * The coefficients only depend on (x1, x2). The x-directions carry no mixed
 * terms (checked at construction), so:
 *  - x-directions use the flux form with half-point averages of g^{aa};
 *  - (y, z) diagonal terms are plain second differences with g^{ii}(x);
 *  - (y, z) mixed terms use the symmetric cross stencil
 *      +-(e_i + e_j): -g^{ij}/(2h^2),  +-(e_i - e_j): +g^{ij}/(2h^2).
 * No (y, z) stencil moves in x, so the shear only enters through x-neighbours.
 */
class DiscreteOperator {
public:
  struct Coupling {
    std::array<std::int8_t, kDim> delta{};
    double weight = 0;
  };

  DiscreteOperator(Scheme scheme, int n) : scheme_(scheme), grid_(n, scheme.wrap())
  {
    require_even_grid(n);
    build_stencils();
  }

  const Scheme& scheme() const { return scheme_; }
  const QuotientGrid& grid() const { return grid_; }
  int n() const { return grid_.n(); }
  std::size_t size() const { return grid_.size(); }

  /// Off-diagonal couplings used at grid points with x-indices (i1, i2).
  const std::vector<Coupling>& stencil(long i1, long i2) const { return stencils_[index_x(i1, i2)]; }

  /// 4x4 block of g^{-1} on (y1, y2, z1, z2) at x-indices (i1, i2).
  const std::array<std::array<double, 4>, 4>& yz_coefficients(long i1, long i2) const
  {
    return yz_[index_x(i1, i2)];
  }

  /// Calls fn(column, value) for the diagonal and every coupling of a row; columns may repeat.
  template <class Fn>
  void for_each_in_row(std::size_t lin, Fn&& fn) const
  {
    GridIndex p = grid_.unlinear(lin);
    const auto& st = stencils_[index_x(p[X1], p[X2])];
    double diag = 0;
    for (const auto& c : st) {
      GridIndex q = p;
      for (int i = 0; i < kDim; ++i)
        q[i] += c.delta[i];
      fn(grid_.linear(grid_.canonical(q)), c.weight);
      diag -= c.weight;
    }
    fn(lin, diag);
  }

  /// Merged, column-sorted row.
  void row(std::size_t lin, std::vector<std::pair<std::uint32_t, double>>& out) const
  {
    out.clear();
    for_each_in_row(lin, [&](std::size_t c, double v) { out.emplace_back(static_cast<std::uint32_t>(c), v); });
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::size_t w = 0;
    for (std::size_t r = 0; r < out.size(); ++r) {
      if (w > 0 && out[w - 1].first == out[r].first)
        out[w - 1].second += out[r].second;
      else
        out[w++] = out[r];
    }
    out.resize(w);
  }

  void apply(const std::vector<double>& x, std::vector<double>& y) const
  {
    if (x.size() != size())
      throw std::invalid_argument("DiscreteOperator::apply size mismatch");
    y.assign(size(), 0.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(size()); ++r) {
      double s = 0;
      for_each_in_row(static_cast<std::size_t>(r), [&](std::size_t c, double v) { s += v * x[c]; });
      y[r] = s;
    }
  }

  CsrMatrix<double> to_csr() const
  {
    if (size() > std::numeric_limits<std::uint32_t>::max())
      throw std::length_error("grid too large for 32-bit column indices");
    CsrMatrix<double> a;
    a.n = size();
    a.rowptr.reserve(size() + 1);
    std::vector<std::pair<std::uint32_t, double>> r;
    for (std::size_t lin = 0; lin < size(); ++lin) {
      row(lin, r);
      a.push_row(r);
    }
    return a;
  }

private:
  std::size_t index_x(long i1, long i2) const
  {
    return static_cast<std::size_t>(i1) * static_cast<std::size_t>(n()) + static_cast<std::size_t>(i2);
  }

  Mat6<double> ginv_at(double x1, double x2) const
  {
    Vec6<double> p{x1, x2, 0, 0, 0, 0};
    return inverse_metric<double>(scheme_.family, scheme_.param, p);
  }

  void build_stencils()
  {
    const long n = grid_.n();
    const double h = grid_.h();
    const double s = static_cast<double>(n) * static_cast<double>(n);
    stencils_.assign(static_cast<std::size_t>(n * n), {});
    yz_.assign(static_cast<std::size_t>(n * n), {});

    for (long i1 = 0; i1 < n; ++i1)
      for (long i2 = 0; i2 < n; ++i2) {
        const Mat6<double> g = ginv_at(i1 * h, i2 * h);
        for (int a : {X1, X2})
          for (int j = 0; j < kDim; ++j)
            if (j != a && g[a][j] != 0.0)
              throw std::domain_error("metric couples an x-direction to another direction; the stencil "
                                      "needs g^{x_a j} = 0 for j != x_a");
        auto& st = stencils_[index_x(i1, i2)];
        auto add = [&](std::array<std::int8_t, kDim> d, double w) {
          if (w != 0.0)
            st.push_back({d, w});
        };

        for (int a : {X1, X2}) {
          Mat6<double> gp = a == X1 ? ginv_at((i1 + 1) * h, i2 * h) : ginv_at(i1 * h, (i2 + 1) * h);
          Mat6<double> gm = a == X1 ? ginv_at((i1 - 1) * h, i2 * h) : ginv_at(i1 * h, (i2 - 1) * h);
          std::array<std::int8_t, kDim> d{};
          d[a] = 1;
          add(d, -0.5 * (g[a][a] + gp[a][a]) * s);
          d[a] = -1;
          add(d, -0.5 * (g[a][a] + gm[a][a]) * s);
        }

        auto& c = yz_[index_x(i1, i2)];
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j)
            c[i][j] = g[Y1 + i][Y1 + j];

        for (int i = Y1; i <= Z2; ++i) {
          std::array<std::int8_t, kDim> d{};
          d[i] = 1;
          add(d, -g[i][i] * s);
          d[i] = -1;
          add(d, -g[i][i] * s);
        }
        for (int i = Y1; i <= Z2; ++i)
          for (int j = i + 1; j <= Z2; ++j) {
            double w = 0.5 * g[i][j] * s;
            for (int si : {1, -1}) {
              std::array<std::int8_t, kDim> d{};
              d[i] = static_cast<std::int8_t>(si);
              d[j] = static_cast<std::int8_t>(si);
              add(d, -w);
              d[j] = static_cast<std::int8_t>(-si);
              add(d, w);
            }
          }
      }
  }

  Scheme scheme_;
  QuotientGrid grid_;
  std::vector<std::vector<Coupling>> stencils_;
  std::vector<std::array<std::array<double, 4>, 4>> yz_;
};

/// The grid involution induced by alpha: (i, k, l) -> canonical(i, -k, -l1, -l2 + N/2).
class ParityOperator {
public:
  explicit ParityOperator(const QuotientGrid& grid) : grid_(grid)
  {
    require_even_grid(grid.n());
    const long half = grid.n() / 2;
    perm_.resize(grid.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t lin = 0; lin < static_cast<std::ptrdiff_t>(grid.size()); ++lin) {
      GridIndex p = grid.unlinear(static_cast<std::size_t>(lin));
      GridIndex q{p[X1], p[X2], -p[Y1], -p[Y2], -p[Z1], -p[Z2] + half};
      perm_[lin] = static_cast<std::uint32_t>(grid.linear(grid.canonical(q)));
    }
  }

  const QuotientGrid& grid() const { return grid_; }
  std::size_t size() const { return perm_.size(); }
  std::size_t operator[](std::size_t i) const { return perm_[i]; }
  const std::vector<std::uint32_t>& permutation() const { return perm_; }

  bool is_involution() const
  {
    for (std::size_t i = 0; i < perm_.size(); ++i)
      if (perm_[perm_[i]] != i)
        return false;
    return true;
  }

  std::vector<std::size_t> fixed_points() const
  {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < perm_.size(); ++i)
      if (perm_[i] == i)
        out.push_back(i);
    return out;
  }

  /// (U u)(p) = u(perm p).
  std::vector<double> apply(const std::vector<double>& u) const
  {
    std::vector<double> v(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
      v[i] = u[perm_[i]];
    return v;
  }

  SignedPermutation<double> as_signed() const
  {
    return SignedPermutation<double>{perm_, std::vector<double>(perm_.size(), 1.0)};
  }

private:
  QuotientGrid grid_;
  std::vector<std::uint32_t> perm_;
};

/// max |(A U - U A)_{pq}| = max |A[perm p, perm q] - A[p, q]|, matrix-free.
inline double commutator_max(const DiscreteOperator& a, const ParityOperator& u)
{
  if (a.size() != u.size() || a.n() != u.grid().n())
    throw std::invalid_argument("commutator_max: operator and parity live on different grids");
  double worst = 0;
#pragma omp parallel
  {
    std::vector<std::pair<std::uint32_t, double>> r, ru, mapped;
    double local = 0;
#pragma omp for schedule(static)
    for (std::ptrdiff_t p = 0; p < static_cast<std::ptrdiff_t>(a.size()); ++p) {
      a.row(static_cast<std::size_t>(p), r);
      a.row(u[static_cast<std::size_t>(p)], ru);
      mapped.clear();
      for (const auto& [c, v] : r)
        mapped.emplace_back(static_cast<std::uint32_t>(u[c]), v);
      std::sort(mapped.begin(), mapped.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
      std::size_t i = 0, j = 0;
      while (i < mapped.size() || j < ru.size()) {
        if (j == ru.size() || (i < mapped.size() && mapped[i].first < ru[j].first)) {
          local = std::max(local, std::abs(mapped[i++].second));
        } else if (i == mapped.size() || ru[j].first < mapped[i].first) {
          local = std::max(local, std::abs(ru[j++].second));
        } else {
          local = std::max(local, std::abs(mapped[i++].second - ru[j++].second));
        }
      }
    }
#pragma omp critical
    worst = std::max(worst, local);
  }
  return worst;
}

// ---------------------------------------------------------------------------
// z-Fourier blocks
//
// The operator commutes with the central translations l -> l + e, so it splits
// into N^2 blocks A_m of size N^4 acting on v(i, k) with u = v * w^{m.l},
// w = exp(2 pi i / N). The alpha-involution maps block m to block -m.

struct BlockLabel {
  int m1 = 0;
  int m2 = 0;

  bool operator==(const BlockLabel&) const = default;
};

inline BlockLabel negate(BlockLabel m, int n) { return {static_cast<int>(mod(-m.m1, n)), static_cast<int>(mod(-m.m2, n))}; }

inline bool self_conjugate(BlockLabel m, int n) { return negate(m, n) == m; }

/// exp(2 pi i (m.l) / N) with the exponent reduced exactly mod N.
inline std::complex<double> block_phase(BlockLabel m, long l1, long l2, int n)
{
  long e = mod(static_cast<long>(m.m1) * l1 + static_cast<long>(m.m2) * l2, n);
  if (e == 0)
    return {1.0, 0.0};
  if (2 * e == n)
    return {-1.0, 0.0};
  if (4 * e == n)
    return {0.0, 1.0};
  if (4 * e == 3 * n)
    return {0.0, -1.0};
  const double th = 2.0 * std::numbers::pi * static_cast<double>(e) / n;
  return {std::cos(th), std::sin(th)};
}

inline double real_phase(BlockLabel m, long l1, long l2, int n)
{
  std::complex<double> w = block_phase(m, l1, l2, n);
  if (w.imag() != 0.0)
    throw std::logic_error("real block requested for a non-self-conjugate label");
  return w.real();
}

template <class Scalar>
Scalar phase_as(BlockLabel m, long l1, long l2, int n)
{
  if constexpr (is_complex<Scalar>::value)
    return block_phase(m, l1, l2, n);
  else
    return real_phase(m, l1, l2, n);
}

/// A_m on the N^4 block indices b = linear(i1, i2, k1, k2).
template <class Scalar>
CsrMatrix<Scalar> z_block(const DiscreteOperator& a, BlockLabel m)
{
  const int n = a.n();
  const std::size_t nz = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  const std::size_t nb = a.size() / nz;
  CsrMatrix<Scalar> out;
  out.n = nb;
  out.rowptr.reserve(nb + 1);
  std::vector<std::pair<std::uint32_t, Scalar>> r;
  for (std::size_t b = 0; b < nb; ++b) {
    r.clear();
    a.for_each_in_row(b * nz, [&](std::size_t c, double v) {
      const long l = static_cast<long>(c % nz);
      r.emplace_back(static_cast<std::uint32_t>(c / nz), Scalar(v) * phase_as<Scalar>(m, l / n, l % n, n));
    });
    out.push_row(r);
  }
  return out;
}

/**
 * R_m with (U u) restricted to block -m equal to R_m v for u = v w^{m.l}:
 * (R_m v)(b) = w^{m.l*} v(b*), where U(b, l=0) = (b*, l*).
 */
template <class Scalar>
SignedPermutation<Scalar> block_parity(const ParityOperator& u, BlockLabel m)
{
  const int n = u.grid().n();
  const std::size_t nz = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  const std::size_t nb = u.size() / nz;
  SignedPermutation<Scalar> r;
  r.perm.resize(nb);
  r.sign.resize(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    const std::size_t img = u[b * nz];
    const long l = static_cast<long>(img % nz);
    r.perm[b] = static_cast<std::uint32_t>(img / nz);
    r.sign[b] = phase_as<Scalar>(m, l / n, l % n, n);
  }
  return r;
}

/**
 * Rigorous lower bound for the spectrum of A_m: the x-part is positive
 * semidefinite, and at fixed x the (y, z)-part is a y-circulant with symbol
 *   sum_i g^{ii} (2 - 2 cos th_i) / h^2 + sum_{i<j} 2 g^{ij} sin th_i sin th_j / h^2,
 * th = 2 pi (p1, p2, m1, m2) / N.
 */
inline double block_lower_bound(const DiscreteOperator& a, BlockLabel m)
{
  const int n = a.n();
  const double s = static_cast<double>(n) * n;
  std::vector<double> cs(n), sn(n);
  for (int j = 0; j < n; ++j) {
    cs[j] = std::cos(2.0 * std::numbers::pi * j / n);
    sn[j] = std::sin(2.0 * std::numbers::pi * j / n);
  }
  double best = std::numeric_limits<double>::infinity();
  for (long i1 = 0; i1 < n; ++i1)
    for (long i2 = 0; i2 < n; ++i2) {
      const auto& g = a.yz_coefficients(i1, i2);
      for (int p1 = 0; p1 < n; ++p1)
        for (int p2 = 0; p2 < n; ++p2) {
          const int f[4] = {p1, p2, m.m1, m.m2};
          double sigma = 0;
          for (int i = 0; i < 4; ++i) {
            sigma += g[i][i] * (2.0 - 2.0 * cs[f[i]]);
            for (int j = i + 1; j < 4; ++j)
              sigma += 2.0 * g[i][j] * sn[f[i]] * sn[f[j]];
          }
          best = std::min(best, sigma * s);
        }
    }
  return best;
}

} // namespace orbispec

namespace orbispec {

// ---------------------------------------------------------------------------
// y-Fourier pieces of a z-block
//
// Inside A_m the (y, z)-stencil is a y-circulant at each x, so it is diagonal
// in y-modes p with symbol sigma(x, p). Wrapping x1 (x2) by q periods shifts
// the z-index by -q (k1, k2) (resp. -q (k2, 0)), which moves mode p to
// p + q (m1, m2) (resp. p + q (0, m1)). A_m therefore splits along the cosets
// of H_m = <(m1, m2), (0, m1)> in Z_N^2 into real symmetric pieces with one
// diagonal entry and four x-couplings per node.

using Mode = std::array<int, 2>;

inline std::vector<Mode> mode_subgroup(BlockLabel m, int n)
{
  std::vector<char> seen(static_cast<std::size_t>(n) * n, 0);
  std::vector<Mode> out{{0, 0}};
  seen[0] = 1;
  const Mode gens[2] = {{m.m1, m.m2}, {0, m.m1}};
  for (std::size_t i = 0; i < out.size(); ++i)
    for (const Mode& g : gens) {
      Mode q{static_cast<int>(mod(out[i][0] + g[0], n)), static_cast<int>(mod(out[i][1] + g[1], n))};
      std::size_t key = static_cast<std::size_t>(q[0]) * n + q[1];
      if (!seen[key]) {
        seen[key] = 1;
        out.push_back(q);
      }
    }
  std::sort(out.begin(), out.end());
  return out;
}

/// Cosets of H_m, each sorted, ordered by their smallest element.
inline std::vector<std::vector<Mode>> mode_cosets(BlockLabel m, int n)
{
  const std::vector<Mode> h = mode_subgroup(m, n);
  std::vector<char> seen(static_cast<std::size_t>(n) * n, 0);
  std::vector<std::vector<Mode>> out;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (seen[static_cast<std::size_t>(a) * n + b])
        continue;
      std::vector<Mode> c;
      for (const Mode& g : h) {
        Mode q{static_cast<int>(mod(a + g[0], n)), static_cast<int>(mod(b + g[1], n))};
        seen[static_cast<std::size_t>(q[0]) * n + q[1]] = 1;
        c.push_back(q);
      }
      std::sort(c.begin(), c.end());
      out.push_back(std::move(c));
    }
  return out;
}

inline std::vector<Mode> negate(const std::vector<Mode>& c, int n)
{
  std::vector<Mode> out;
  out.reserve(c.size());
  for (const Mode& p : c)
    out.push_back({static_cast<int>(mod(-p[0], n)), static_cast<int>(mod(-p[1], n))});
  std::sort(out.begin(), out.end());
  return out;
}

/// Symbol of the (y, z)-stencil at x-indices (i1, i2) on y-mode p inside block m.
inline double yz_symbol(const DiscreteOperator& a, long i1, long i2, Mode p, BlockLabel m)
{
  const int n = a.n();
  double s = 0;
  for (const auto& c : a.stencil(i1, i2)) {
    if (c.delta[X1] != 0 || c.delta[X2] != 0)
      continue;
    long e = static_cast<long>(p[0]) * c.delta[Y1] + static_cast<long>(p[1]) * c.delta[Y2] +
             static_cast<long>(m.m1) * c.delta[Z1] + static_cast<long>(m.m2) * c.delta[Z2];
    s += c.weight * (block_phase({1, 0}, e, 0, n).real() - 1.0);
  }
  return s;
}

/// Lower bound min_{x, p in coset} sigma(x, p) for a piece; the x-part is positive semidefinite.
inline double piece_lower_bound(const DiscreteOperator& a, BlockLabel m, const std::vector<Mode>& coset)
{
  double best = std::numeric_limits<double>::infinity();
  for (long i1 = 0; i1 < a.n(); ++i1)
    for (long i2 = 0; i2 < a.n(); ++i2)
      for (const Mode& p : coset)
        best = std::min(best, yz_symbol(a, i1, i2, p, m));
  return best;
}

/// The piece of A_m on nodes (i1, i2, p), p in coset, indexed ((i1 N + i2) |C| + pos(p)).
inline CsrMatrix<double> piece_matrix(const DiscreteOperator& a, BlockLabel m, const std::vector<Mode>& coset)
{
  const int n = a.n();
  const std::size_t c = coset.size();
  std::vector<std::int64_t> pos(static_cast<std::size_t>(n) * n, -1);
  for (std::size_t j = 0; j < c; ++j)
    pos[static_cast<std::size_t>(coset[j][0]) * n + coset[j][1]] = static_cast<std::int64_t>(j);
  const bool shear = a.grid().wrap() == Wrap::shear;

  CsrMatrix<double> out;
  out.n = static_cast<std::size_t>(n) * n * c;
  std::vector<std::pair<std::uint32_t, double>> row;
  for (long i1 = 0; i1 < n; ++i1)
    for (long i2 = 0; i2 < n; ++i2)
      for (std::size_t j = 0; j < c; ++j) {
        const Mode p = coset[j];
        row.clear();
        double diag = yz_symbol(a, i1, i2, p, m);
        for (const auto& cp : a.stencil(i1, i2)) {
          if (cp.delta[X1] == 0 && cp.delta[X2] == 0)
            continue;
          for (int k = Y1; k <= Z2; ++k)
            if (cp.delta[k] != 0)
              throw std::logic_error("x-coupling with a (y, z) offset; pieces need pure x-couplings");
          long j1 = i1 + cp.delta[X1], j2 = i2 + cp.delta[X2];
          long q1 = shear ? floor_div(j1, n) : 0;
          long q2 = shear ? floor_div(j2, n) : 0;
          Mode pp{static_cast<int>(mod(p[0] + q1 * m.m1, n)), static_cast<int>(mod(p[1] + q1 * m.m2 + q2 * m.m1, n))};
          std::int64_t at = pos[static_cast<std::size_t>(pp[0]) * n + pp[1]];
          if (at < 0)
            throw std::logic_error("x-wrap left the mode coset");
          std::size_t col = (static_cast<std::size_t>(mod(j1, n)) * n + static_cast<std::size_t>(mod(j2, n))) * c +
                            static_cast<std::size_t>(at);
          row.emplace_back(static_cast<std::uint32_t>(col), cp.weight);
          diag -= cp.weight;
        }
        row.emplace_back(static_cast<std::uint32_t>((static_cast<std::size_t>(i1) * n + i2) * c + j), diag);
        out.push_row(row);
      }
  return out;
}

/**
 * The alpha-involution between piece (m, C) and piece (-m, -C):
 * (R v)(x, p) = (-1)^{m2} v(x, -p). Only meaningful as an involution when
 * m = -m and C = -C.
 */
inline SignedPermutation<double> piece_parity(BlockLabel m, const std::vector<Mode>& coset, int n)
{
  const std::size_t c = coset.size();
  std::vector<std::int64_t> pos(static_cast<std::size_t>(n) * n, -1);
  for (std::size_t j = 0; j < c; ++j)
    pos[static_cast<std::size_t>(coset[j][0]) * n + coset[j][1]] = static_cast<std::int64_t>(j);
  const double sign = m.m2 % 2 == 0 ? 1.0 : -1.0;
  SignedPermutation<double> r;
  r.perm.resize(static_cast<std::size_t>(n) * n * c);
  r.sign.assign(r.perm.size(), sign);
  for (std::size_t x = 0; x < static_cast<std::size_t>(n) * n; ++x)
    for (std::size_t j = 0; j < c; ++j) {
      std::int64_t at = pos[static_cast<std::size_t>(mod(-coset[j][0], n)) * n + static_cast<std::size_t>(mod(-coset[j][1], n))];
      if (at < 0)
        throw std::logic_error("piece_parity needs a coset closed under negation");
      r.perm[x * c + j] = static_cast<std::uint32_t>(x * c + static_cast<std::size_t>(at));
    }
  return r;
}

} // namespace orbispec
