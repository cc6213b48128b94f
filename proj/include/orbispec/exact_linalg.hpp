#pragma once

#include "orbispec/rational.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace orbispec {

/// Dense row-major rational matrix for the small exact systems in this library.
class RationalMatrix {
public:
  RationalMatrix() = default;
  RationalMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols) {}

  static RationalMatrix identity(int n)
  {
    RationalMatrix m(n, n);
    for (int i = 0; i < n; ++i)
      m(i, i) = 1;
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  Rational& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
  const Rational& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

  friend bool operator==(const RationalMatrix& a, const RationalMatrix& b)
  {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.a_ == b.a_;
  }

  friend RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b)
  {
    if (a.cols_ != b.rows_)
      throw std::invalid_argument("matrix shape mismatch");
    RationalMatrix c(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i)
      for (int k = 0; k < a.cols_; ++k) {
        const Rational& aik = a(i, k);
        if (aik == 0)
          continue;
        for (int j = 0; j < b.cols_; ++j)
          if (b(k, j) != 0)
            c(i, j) += aik * b(k, j);
      }
    return c;
  }

  std::vector<Rational> apply(const std::vector<Rational>& v) const
  {
    if (static_cast<int>(v.size()) != cols_)
      throw std::invalid_argument("vector shape mismatch");
    std::vector<Rational> out(rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j)
        if ((*this)(i, j) != 0 && v[j] != 0)
          out[i] += (*this)(i, j) * v[j];
    return out;
  }

  RationalMatrix transpose() const
  {
    RationalMatrix t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j)
        t(j, i) = (*this)(i, j);
    return t;
  }

private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Rational> a_;
};

/**
 * Solution set of A x = b over Q: a particular solution with free variables
 * set to zero, plus one kernel direction per free variable.
 */
struct AffineSolutionSet {
  bool consistent = false;
  std::vector<Rational> particular;
  std::vector<int> free_variables;
  std::vector<std::vector<Rational>> kernel;
  /// pivot_of[j] is the pivot row of variable j, or -1 if j is free.
  std::vector<int> pivot_of;
  /// Reduced row echelon form of [A | b].
  RationalMatrix rref;

  /// Variable j takes the same value for every solution.
  bool is_forced(int j) const
  {
    for (const auto& k : kernel)
      if (k[j] != 0)
        return false;
    return true;
  }
};

/// Gauss-Jordan elimination with pivots chosen left to right.
inline AffineSolutionSet solve_linear(const RationalMatrix& a, const std::vector<Rational>& b)
{
  const int m = a.rows();
  const int n = a.cols();
  if (static_cast<int>(b.size()) != m)
    throw std::invalid_argument("rhs shape mismatch");

  RationalMatrix aug(m, n + 1);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j)
      aug(i, j) = a(i, j);
    aug(i, n) = b[i];
  }

  AffineSolutionSet out;
  out.pivot_of.assign(n, -1);
  int row = 0;
  for (int col = 0; col < n && row < m; ++col) {
    int p = -1;
    for (int r = row; r < m; ++r)
      if (aug(r, col) != 0) {
        p = r;
        break;
      }
    if (p < 0)
      continue;
    if (p != row)
      for (int j = 0; j <= n; ++j)
        std::swap(aug(p, j), aug(row, j));
    Rational inv = 1 / aug(row, col);
    for (int j = col; j <= n; ++j)
      aug(row, j) *= inv;
    for (int r = 0; r < m; ++r) {
      if (r == row || aug(r, col) == 0)
        continue;
      Rational f = aug(r, col);
      for (int j = col; j <= n; ++j)
        aug(r, j) -= f * aug(row, j);
    }
    out.pivot_of[col] = row;
    ++row;
  }

  out.consistent = true;
  for (int r = row; r < m; ++r)
    if (aug(r, n) != 0)
      out.consistent = false;

  out.rref = aug;
  if (!out.consistent)
    return out;

  out.particular.assign(n, Rational(0));
  for (int j = 0; j < n; ++j)
    if (out.pivot_of[j] >= 0)
      out.particular[j] = aug(out.pivot_of[j], n);

  for (int f = 0; f < n; ++f) {
    if (out.pivot_of[f] >= 0)
      continue;
    out.free_variables.push_back(f);
    std::vector<Rational> k(n, Rational(0));
    k[f] = 1;
    for (int j = 0; j < n; ++j)
      if (out.pivot_of[j] >= 0)
        k[j] = -aug(out.pivot_of[j], f);
    out.kernel.push_back(std::move(k));
  }
  return out;
}

inline Rational determinant(RationalMatrix a)
{
  if (a.rows() != a.cols())
    throw std::invalid_argument("determinant of non-square matrix");
  const int n = a.rows();
  Rational det = 1;
  for (int col = 0; col < n; ++col) {
    int p = -1;
    for (int r = col; r < n; ++r)
      if (a(r, col) != 0) {
        p = r;
        break;
      }
    if (p < 0)
      return 0;
    if (p != col) {
      for (int j = 0; j < n; ++j)
        std::swap(a(p, j), a(col, j));
      det = -det;
    }
    det *= a(col, col);
    for (int r = col + 1; r < n; ++r) {
      if (a(r, col) == 0)
        continue;
      Rational f = a(r, col) / a(col, col);
      for (int j = col; j < n; ++j)
        a(r, j) -= f * a(col, j);
    }
  }
  return det;
}

inline std::optional<RationalMatrix> inverse(const RationalMatrix& a)
{
  const int n = a.rows();
  if (n != a.cols())
    throw std::invalid_argument("inverse of non-square matrix");
  RationalMatrix inv(n, n);
  for (int j = 0; j < n; ++j) {
    std::vector<Rational> e(n, Rational(0));
    e[j] = 1;
    auto s = solve_linear(a, e);
    if (!s.consistent || !s.free_variables.empty())
      return std::nullopt;
    for (int i = 0; i < n; ++i)
      inv(i, j) = s.particular[i];
  }
  return inv;
}

} // namespace orbispec
