#pragma once

#include <complex>
#ifndef lapack_complex_double
#define lapack_complex_double std::complex<double>
#endif
#ifndef lapack_complex_float
#define lapack_complex_float std::complex<float>
#endif
#include <lapacke.h>

#include "orbispec/sparse.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace orbispec {

/// Eigenvalues (ascending) and eigenvectors of a dense Hermitian matrix.
template <class Scalar>
struct DenseEigenSystem {
  std::vector<double> values;
  DenseMatrix<Scalar> vectors;
};

namespace detail {

template <class Scalar>
int hermitian_eig(char jobz, DenseMatrix<Scalar>& a, std::vector<double>& w)
{
  const lapack_int n = static_cast<lapack_int>(a.rows());
  w.assign(static_cast<std::size_t>(n), 0.0);
  if (n == 0)
    return 0;
  if constexpr (is_complex<Scalar>::value)
    return LAPACKE_zheevd(LAPACK_COL_MAJOR, jobz, 'L', n, a.data(), n, w.data());
  else
    return LAPACKE_dsyevd(LAPACK_COL_MAJOR, jobz, 'L', n, a.data(), n, w.data());
}

} // namespace detail

/// All eigenvalues of a Hermitian matrix; the matrix is consumed.
template <class Scalar>
std::vector<double> hermitian_eigenvalues(DenseMatrix<Scalar> a)
{
  if (a.rows() != a.cols())
    throw std::invalid_argument("hermitian_eigenvalues needs a square matrix");
  std::vector<double> w;
  int info = detail::hermitian_eig('N', a, w);
  if (info != 0)
    throw std::runtime_error("LAPACK eigensolver failed, info=" + std::to_string(info));
  return w;
}

template <class Scalar>
DenseEigenSystem<Scalar> hermitian_eigensystem(DenseMatrix<Scalar> a)
{
  if (a.rows() != a.cols())
    throw std::invalid_argument("hermitian_eigensystem needs a square matrix");
  DenseEigenSystem<Scalar> out;
  int info = detail::hermitian_eig('V', a, out.values);
  if (info != 0)
    throw std::runtime_error("LAPACK eigensolver failed, info=" + std::to_string(info));
  out.vectors = std::move(a);
  return out;
}

} // namespace orbispec
