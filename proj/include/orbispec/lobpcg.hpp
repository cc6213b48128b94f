#pragma once

#include "orbispec/sparse.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

namespace orbispec {

struct LobpcgOptions {
  int nev = 1;
  int block = 0;  // 0 picks nev + max(8, nev / 2)
  double tol = 1e-8;
  int max_iter = 500;
  std::uint64_t seed = 0;
  int refresh = 20;  // recompute A X from scratch this often
};

template <class Scalar>
struct LobpcgResult {
  std::vector<double> values;
  DenseMatrix<Scalar> vectors;
  std::vector<double> residuals;  // ||A v - lambda v|| per returned pair
  int iterations = 0;
  bool converged = false;
};

template <class Scalar>
using BlockOperator = std::function<void(const DenseMatrix<Scalar>&, DenseMatrix<Scalar>&)>;

template <class Scalar>
using BlockProjector = std::function<void(DenseMatrix<Scalar>&)>;

/// Applied in place to the residual block each iteration.
template <class Scalar>
using BlockPreconditioner = std::function<void(DenseMatrix<Scalar>&)>;

/// Row scaling by the inverse diagonal, floored at 1e-12 of the largest entry.
template <class Scalar>
BlockPreconditioner<Scalar> jacobi_preconditioner(const Eigen::VectorXd& diag)
{
  Eigen::VectorXd inv(diag.size());
  const double dmax = diag.size() ? diag.cwiseAbs().maxCoeff() : 1.0;
  for (Eigen::Index i = 0; i < diag.size(); ++i)
    inv(i) = 1.0 / std::max(std::abs(diag(i)), 1e-12 * std::max(dmax, 1.0));
  return [inv](DenseMatrix<Scalar>& w) { w = inv.asDiagonal() * w; };
}

namespace detail {

/// Uniform in [-1/2, 1/2) from the top 53 bits; independent of the standard library's distributions.
inline double unit_sample(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5; }

template <class Scalar>
DenseMatrix<Scalar> random_block(std::size_t n, int b, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  DenseMatrix<Scalar> x(static_cast<Eigen::Index>(n), b);
  for (int j = 0; j < b; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      if constexpr (is_complex<Scalar>::value) {
        double re = unit_sample(rng);
        double im = unit_sample(rng);
        x(static_cast<Eigen::Index>(i), j) = Scalar(re, im);
      } else {
        x(static_cast<Eigen::Index>(i), j) = unit_sample(rng);
      }
    }
  return x;
}

template <class Scalar>
DenseMatrix<Scalar> hermitian_part(const DenseMatrix<Scalar>& h)
{
  return (h + h.adjoint()) * 0.5;
}

/**
 * In-place SVQB orthonormalization of the columns of m, applying the same
 * transform to am when given. Directions whose scaled Gram eigenvalue falls
 * below drop * max are removed.
 */
template <class Scalar>
void svqb(DenseMatrix<Scalar>& m, DenseMatrix<Scalar>* am, double drop)
{
  if (m.cols() == 0)
    return;
  DenseMatrix<Scalar> g = hermitian_part<Scalar>(m.adjoint() * m);
  const Eigen::Index c = g.rows();
  Eigen::VectorXd d(c);
  for (Eigen::Index j = 0; j < c; ++j) {
    double v = std::real(g(j, j));
    d(j) = v > 0 ? 1.0 / std::sqrt(v) : 0.0;
  }
  DenseMatrix<Scalar> gs = d.asDiagonal() * g * d.asDiagonal();
  Eigen::SelfAdjointEigenSolver<DenseMatrix<Scalar>> es(gs);
  const Eigen::VectorXd& th = es.eigenvalues();
  const double tmax = th.size() ? th(th.size() - 1) : 0.0;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < th.size(); ++j)
    if (tmax > 0 && th(j) > drop * tmax)
      keep.push_back(j);
  DenseMatrix<Scalar> t(c, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k)
    t.col(static_cast<Eigen::Index>(k)) = d.asDiagonal() * es.eigenvectors().col(keep[k]) / std::sqrt(th(keep[k]));
  m = m * t;
  if (am)
    *am = *am * t;
}

/// m -= basis (basis^H m), twice; the same combination is applied to am with a_basis.
template <class Scalar>
void orthogonalize_against(DenseMatrix<Scalar>& m, DenseMatrix<Scalar>* am, const DenseMatrix<Scalar>& basis,
                           const DenseMatrix<Scalar>* a_basis)
{
  if (basis.cols() == 0 || m.cols() == 0)
    return;
  for (int pass = 0; pass < 2; ++pass) {
    DenseMatrix<Scalar> c = basis.adjoint() * m;
    m -= basis * c;
    if (am && a_basis)
      *am -= *a_basis * c;
  }
}

template <class Scalar>
DenseMatrix<Scalar> select_columns(const DenseMatrix<Scalar>& m, const std::vector<Eigen::Index>& cols)
{
  DenseMatrix<Scalar> out(m.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k)
    out.col(static_cast<Eigen::Index>(k)) = m.col(cols[k]);
  return out;
}

template <class Scalar>
DenseMatrix<Scalar> hcat(const DenseMatrix<Scalar>& a, const DenseMatrix<Scalar>& b, const DenseMatrix<Scalar>& c)
{
  DenseMatrix<Scalar> out(a.rows(), a.cols() + b.cols() + c.cols());
  if (a.cols())
    out.leftCols(a.cols()) = a;
  if (b.cols())
    out.middleCols(a.cols(), b.cols()) = b;
  if (c.cols())
    out.rightCols(c.cols()) = c;
  return out;
}

} // namespace detail

/**
 * Block LOBPCG for the smallest eigenpairs of a Hermitian positive
 * semidefinite operator, with a preconditioner and an optional projector
 * onto an invariant subspace. A pair counts as converged
 * when ||A v - lambda v|| <= tol * max(1, |lambda|).
 */
template <class Scalar>
LobpcgResult<Scalar> lobpcg(const BlockOperator<Scalar>& a, std::size_t n, const BlockPreconditioner<Scalar>& precond,
                            LobpcgOptions opt, const BlockProjector<Scalar>& project = nullptr)
{
  using Mat = DenseMatrix<Scalar>;
  if (opt.nev < 1)
    throw std::invalid_argument("lobpcg needs nev >= 1");
  int b = opt.block > 0 ? opt.block : opt.nev + std::max(8, opt.nev / 2);
  b = std::max(b, opt.nev);
  if (static_cast<std::size_t>(3 * b) > n)
    throw std::invalid_argument("lobpcg block too large for the problem size; use a dense solver");

  const double drop = 1e-12;

  Mat x = detail::random_block<Scalar>(n, b, opt.seed);
  if (project)
    project(x);
  detail::svqb<Scalar>(x, nullptr, drop);
  detail::svqb<Scalar>(x, nullptr, drop);
  if (x.cols() < opt.nev)
    throw std::runtime_error("lobpcg: initial block is rank deficient after projection");
  Mat ax;
  a(x, ax);

  auto rayleigh_ritz = [](const Mat& q, const Mat& aq, Eigen::Index keep, Mat& xo, Mat& axo, Eigen::VectorXd& lam) {
    Mat h = detail::hermitian_part<Scalar>(q.adjoint() * aq);
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    Mat c = es.eigenvectors().leftCols(keep);
    xo = q * c;
    axo = aq * c;
    lam = es.eigenvalues().head(keep);
  };

  Eigen::VectorXd lam;
  {
    Mat xn, axn;
    rayleigh_ritz(x, ax, x.cols(), xn, axn, lam);
    x = std::move(xn);
    ax = std::move(axn);
  }
  b = static_cast<int>(x.cols());

  LobpcgResult<Scalar> res;
  Mat p, ap;
  std::vector<double> rnorm(static_cast<std::size_t>(b));

  for (int it = 0; it <= opt.max_iter; ++it) {
    Mat r = ax - x * lam.asDiagonal();
    std::vector<Eigen::Index> active;
    bool done = true;
    for (int j = 0; j < b; ++j) {
      rnorm[j] = r.col(j).norm();
      bool ok = rnorm[j] <= opt.tol * std::max(1.0, std::abs(lam(j)));
      if (!ok) {
        active.push_back(j);
        if (j < opt.nev)
          done = false;
      }
    }
    if (done) {
      // Confirm against a freshly applied operator before accepting.
      Mat ax_fresh;
      a(x, ax_fresh);
      Mat rf = ax_fresh - x * lam.asDiagonal();
      bool confirmed = true;
      for (int j = 0; j < opt.nev; ++j) {
        rnorm[j] = rf.col(j).norm();
        confirmed = confirmed && rnorm[j] <= opt.tol * std::max(1.0, std::abs(lam(j)));
      }
      ax = std::move(ax_fresh);
      if (confirmed) {
        res.converged = true;
        res.iterations = it;
        break;
      }
      continue;
    }
    if (it == opt.max_iter) {
      res.iterations = it;
      break;
    }

    Mat w = detail::select_columns<Scalar>(r, active);
    if (precond)
      precond(w);
    if (project)
      project(w);
    detail::orthogonalize_against<Scalar>(w, nullptr, x, nullptr);
    detail::svqb<Scalar>(w, nullptr, drop);
    detail::svqb<Scalar>(w, nullptr, drop);
    Mat aw;
    a(w, aw);

    if (p.cols() > 0) {
      // A P is recomputed rather than carried along: after orthogonalization
      // P may be nearly dependent, and rescaling would amplify drift in A P.
      detail::orthogonalize_against<Scalar>(p, nullptr, x, nullptr);
      detail::orthogonalize_against<Scalar>(p, nullptr, w, nullptr);
      detail::svqb<Scalar>(p, nullptr, drop);
      detail::svqb<Scalar>(p, nullptr, drop);
      a(p, ap);
    }

    Mat q = detail::hcat<Scalar>(x, w, p);
    Mat aq = detail::hcat<Scalar>(ax, aw, ap);
    Mat xn, axn;
    Eigen::VectorXd lamn;
    rayleigh_ritz(q, aq, b, xn, axn, lamn);

    Mat xa = detail::select_columns<Scalar>(xn, active);
    p = xa - x * (x.adjoint() * xa);

    x = std::move(xn);
    ax = std::move(axn);
    lam = lamn;

    if (opt.refresh > 0 && (it + 1) % opt.refresh == 0) {
      detail::svqb<Scalar>(x, &ax, drop);
      a(x, ax);
      Mat xr, axr;
      rayleigh_ritz(x, ax, x.cols(), xr, axr, lam);
      x = std::move(xr);
      ax = std::move(axr);
      if (x.cols() < opt.nev)
        throw std::runtime_error("lobpcg: basis collapsed below nev columns");
      b = static_cast<int>(x.cols());
      rnorm.resize(static_cast<std::size_t>(b));
    }
  }

  res.values.assign(lam.data(), lam.data() + opt.nev);
  res.vectors = x.leftCols(opt.nev);
  res.residuals.assign(rnorm.begin(), rnorm.begin() + opt.nev);
  if (!res.converged && res.iterations == 0)
    res.iterations = opt.max_iter;
  return res;
}

} // namespace orbispec
