#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <vector>

namespace orbispec {

template <class Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <class Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <class T>
struct is_complex : std::false_type {};
template <class T>
struct is_complex<std::complex<T>> : std::true_type {};

inline double conj_val(double v) { return v; }
inline std::complex<double> conj_val(std::complex<double> v) { return std::conj(v); }

/// Compressed sparse row matrix; columns of each row are sorted and unique.
template <class Scalar>
struct CsrMatrix {
  std::size_t n = 0;
  std::vector<std::size_t> rowptr{0};
  std::vector<std::uint32_t> col;
  std::vector<Scalar> val;

  std::size_t nnz() const { return val.size(); }

  /// Appends a row from unsorted (col, value) pairs, merging duplicates.
  void push_row(std::vector<std::pair<std::uint32_t, Scalar>>& entries)
  {
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 0; i < entries.size();) {
      std::uint32_t c = entries[i].first;
      Scalar v = entries[i].second;
      std::size_t j = i + 1;
      for (; j < entries.size() && entries[j].first == c; ++j)
        v += entries[j].second;
      col.push_back(c);
      val.push_back(v);
      i = j;
    }
    rowptr.push_back(val.size());
  }

  Scalar at(std::size_t r, std::size_t c) const
  {
    auto b = col.begin() + static_cast<std::ptrdiff_t>(rowptr[r]);
    auto e = col.begin() + static_cast<std::ptrdiff_t>(rowptr[r + 1]);
    auto it = std::lower_bound(b, e, static_cast<std::uint32_t>(c));
    if (it == e || *it != c)
      return Scalar(0);
    return val[static_cast<std::size_t>(it - col.begin())];
  }

  Scalar diagonal(std::size_t r) const { return at(r, r); }

  DenseVector<Scalar> diagonal() const
  {
    DenseVector<Scalar> d(static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < n; ++r)
      d(static_cast<Eigen::Index>(r)) = diagonal(r);
    return d;
  }

  /// Y = A X for a block of column vectors.
  void apply(const DenseMatrix<Scalar>& x, DenseMatrix<Scalar>& y) const
  {
    using RowMajor = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    if (static_cast<std::size_t>(x.rows()) != n)
      throw std::invalid_argument("CsrMatrix::apply shape mismatch");
    const Eigen::Index b = x.cols();
    RowMajor xr = x;
    RowMajor yr(x.rows(), b);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(n); ++r) {
      auto out = yr.row(r);
      out.setZero();
      for (std::size_t p = rowptr[r]; p < rowptr[r + 1]; ++p)
        out += val[p] * xr.row(static_cast<Eigen::Index>(col[p]));
    }
    y = yr;
  }

  DenseMatrix<Scalar> to_dense() const
  {
    DenseMatrix<Scalar> d = DenseMatrix<Scalar>::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t p = rowptr[r]; p < rowptr[r + 1]; ++p)
        d(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col[p])) = val[p];
    return d;
  }

  /// max |A_ij - conj(A_ji)|.
  double hermitian_defect() const
  {
    double worst = 0;
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t p = rowptr[r]; p < rowptr[r + 1]; ++p)
        worst = std::max(worst, std::abs(val[p] - conj_val(at(col[p], r))));
    return worst;
  }

  /// max_i |sum_j A_ij|.
  double max_row_sum() const
  {
    double worst = 0;
    for (std::size_t r = 0; r < n; ++r) {
      Scalar s(0);
      for (std::size_t p = rowptr[r]; p < rowptr[r + 1]; ++p)
        s += val[p];
      worst = std::max(worst, std::abs(s));
    }
    return worst;
  }

  Scalar trace() const
  {
    Scalar s(0);
    for (std::size_t r = 0; r < n; ++r)
      s += diagonal(r);
    return s;
  }

  friend bool operator==(const CsrMatrix& a, const CsrMatrix& b)
  {
    return a.n == b.n && a.rowptr == b.rowptr && a.col == b.col && a.val == b.val;
  }
};

/**
 * A signed permutation (R u)(i) = sign[i] * u(perm[i]). Used for the
 * involution alpha on grid functions and on z-Fourier blocks.
 */
template <class Scalar>
struct SignedPermutation {
  std::vector<std::uint32_t> perm;
  std::vector<Scalar> sign;

  std::size_t size() const { return perm.size(); }

  bool is_involution(double tol = 0) const
  {
    for (std::size_t i = 0; i < perm.size(); ++i) {
      std::size_t j = perm[i];
      if (perm[j] != i || std::abs(sign[i] * sign[j] - Scalar(1)) > tol)
        return false;
    }
    return true;
  }
};

/// max |A - R A R| entrywise, which is max |[A, R]| for an involution R with unit signs.
template <class Scalar>
double commutator_max(const CsrMatrix<Scalar>& a, const SignedPermutation<Scalar>& r)
{
  if (a.n != r.size())
    throw std::invalid_argument("commutator_max: matrix and permutation sizes differ");
  double worst = 0;
  for (std::size_t i = 0; i < a.n; ++i)
    for (std::size_t p = a.rowptr[i]; p < a.rowptr[i + 1]; ++p) {
      const std::size_t k = a.col[p];
      const Scalar mapped = r.sign[i] * a.at(r.perm[i], r.perm[k]) * r.sign[r.perm[k]];
      worst = std::max(worst, std::abs(a.val[p] - mapped));
    }
  return worst;
}

/**
 * Restriction of a symmetric/Hermitian A commuting with the involution R to
 * the eigenspace R = eps (eps = +1 or -1), in the orthonormal basis built
 * from the orbits of R.
 */
template <class Scalar>
struct EigenspaceBasis {
  std::vector<std::vector<std::pair<std::uint32_t, Scalar>>> columns;
  std::vector<std::int64_t> column_of;  // basis column containing index i, or -1
  std::vector<Scalar> weight_of;

  std::size_t dim() const { return columns.size(); }
};

template <class Scalar>
EigenspaceBasis<Scalar> eigenspace_basis(const SignedPermutation<Scalar>& r, int eps)
{
  if (eps != 1 && eps != -1)
    throw std::invalid_argument("eigenspace sign must be +1 or -1");
  if (!r.is_involution(1e-12))
    throw std::invalid_argument("signed permutation is not an involution");
  const std::size_t n = r.size();
  EigenspaceBasis<Scalar> basis;
  basis.column_of.assign(n, -1);
  basis.weight_of.assign(n, Scalar(0));
  const double s2 = 1.0 / std::sqrt(2.0);
  for (std::size_t a = 0; a < n; ++a) {
    std::size_t b = r.perm[a];
    if (b < a)
      continue;
    if (b == a) {
      if (std::abs(r.sign[a] - Scalar(eps)) > 1e-12)
        continue;
      basis.column_of[a] = static_cast<std::int64_t>(basis.columns.size());
      basis.weight_of[a] = Scalar(1);
      basis.columns.push_back({{static_cast<std::uint32_t>(a), Scalar(1)}});
      continue;
    }
    // v(b) = 1/sqrt2, v(a) = eps * sign[a] / sqrt2 satisfies R v = eps v.
    Scalar wa = Scalar(eps * s2) * r.sign[a];
    Scalar wb = Scalar(s2);
    std::int64_t c = static_cast<std::int64_t>(basis.columns.size());
    basis.column_of[a] = c;
    basis.column_of[b] = c;
    basis.weight_of[a] = wa;
    basis.weight_of[b] = wb;
    basis.columns.push_back({{static_cast<std::uint32_t>(a), wa}, {static_cast<std::uint32_t>(b), wb}});
  }
  return basis;
}

/// V^H A V for the orthonormal eigenspace basis V.
template <class Scalar>
CsrMatrix<Scalar> restrict_to(const CsrMatrix<Scalar>& a, const EigenspaceBasis<Scalar>& v)
{
  CsrMatrix<Scalar> out;
  out.n = v.dim();
  std::vector<std::pair<std::uint32_t, Scalar>> row;
  for (std::size_t i = 0; i < v.dim(); ++i) {
    row.clear();
    for (const auto& [ia, wa] : v.columns[i])
      for (std::size_t p = a.rowptr[ia]; p < a.rowptr[ia + 1]; ++p) {
        std::uint32_t b = a.col[p];
        std::int64_t j = v.column_of[b];
        if (j < 0)
          continue;
        row.emplace_back(static_cast<std::uint32_t>(j), conj_val(wa) * a.val[p] * v.weight_of[b]);
      }
    out.push_row(row);
  }
  return out;
}

} // namespace orbispec
