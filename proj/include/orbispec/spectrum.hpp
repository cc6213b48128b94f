#pragma once

#include "orbispec/cache.hpp"
#include "orbispec/dense_eigen.hpp"
#include "orbispec/lobpcg.hpp"
#include "orbispec/operator.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <memory>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace orbispec {

enum class Parity { even, odd, full };

inline std::string to_string(Parity p)
{
  switch (p) {
  case Parity::even: return "even";
  case Parity::odd: return "odd";
  case Parity::full: return "full";
  }
  return "?";
}

inline Parity parse_parity(const std::string& s)
{
  if (s == "even")
    return Parity::even;
  if (s == "odd")
    return Parity::odd;
  if (s == "full")
    return Parity::full;
  throw std::invalid_argument("unknown parity: " + s);
}

inline int parity_sign(Parity p)
{
  if (p == Parity::full)
    throw std::invalid_argument("full parity has no eigenspace sign");
  return p == Parity::even ? 1 : -1;
}

/**
 * LOBPCG preconditioner. jacobi is the plain diagonal; shifted_ldlt applies
 * (A + delta I)^{-1} through a sparse LDL^T factorization, delta = 1% of the
 * mean diagonal. Jacobi needs O(sqrt(kappa)) iterations and stalls on the
 * N = 12 pieces, whose graphs are two-dimensional and factor cheaply.
 */
enum class Preconditioner { jacobi, shifted_ldlt };

inline std::string to_string(Preconditioner p) { return p == Preconditioner::jacobi ? "jacobi" : "shifted-ldlt"; }

inline Preconditioner parse_preconditioner(const std::string& s)
{
  if (s == "jacobi")
    return Preconditioner::jacobi;
  if (s == "shifted-ldlt")
    return Preconditioner::shifted_ldlt;
  throw std::invalid_argument("unknown preconditioner: " + s);
}

struct SolverOptions {
  double tol = 1e-8;
  int max_iter = 500;
  std::uint64_t seed = 0;
  std::size_t dense_limit = 3000;  // problems up to this size go to LAPACK
  Preconditioner precond = Preconditioner::jacobi;
  const OperatorCache* cache = nullptr;  // optional on-disk store for real assembled matrices
};

/// The assembled CSR operator, through the cache when one is configured.
inline CsrMatrix<double> assembled_csr(const DiscreteOperator& a, const OperatorCache* cache)
{
  if (!cache)
    return a.to_csr();
  CacheKey key{a.scheme().family, a.scheme().param, a.n(), Scheme::version, "full"};
  return cache->load_or_build(key, [&a] { return a.to_csr(); });
}

template <class Scalar>
Eigen::SparseMatrix<Scalar> to_eigen_sparse(const CsrMatrix<Scalar>& a)
{
  std::vector<Eigen::Triplet<Scalar>> trip;
  trip.reserve(a.nnz());
  for (std::size_t r = 0; r < a.n; ++r)
    for (std::size_t p = a.rowptr[r]; p < a.rowptr[r + 1]; ++p)
      trip.emplace_back(static_cast<int>(r), static_cast<int>(a.col[p]), a.val[p]);
  Eigen::SparseMatrix<Scalar> m(static_cast<Eigen::Index>(a.n), static_cast<Eigen::Index>(a.n));
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

template <class Scalar>
BlockPreconditioner<Scalar> make_preconditioner(const CsrMatrix<Scalar>& a, Preconditioner kind)
{
  Eigen::VectorXd diag(static_cast<Eigen::Index>(a.n));
  for (std::size_t i = 0; i < a.n; ++i)
    diag(static_cast<Eigen::Index>(i)) = std::real(a.diagonal(i));
  if (kind == Preconditioner::jacobi)
    return jacobi_preconditioner<Scalar>(diag);
  const double delta = 0.01 * diag.cwiseAbs().mean();
  Eigen::SparseMatrix<Scalar> m = to_eigen_sparse(a);
  Eigen::SparseMatrix<Scalar> id(m.rows(), m.cols());
  id.setIdentity();
  m += Scalar(delta) * id;
  auto solver = std::make_shared<Eigen::SimplicialLDLT<Eigen::SparseMatrix<Scalar>>>(m);
  if (solver->info() != Eigen::Success)
    throw std::runtime_error("sparse LDL^T factorization of the shifted operator failed");
  return [solver](DenseMatrix<Scalar>& w) { w = solver->solve(w); };
}

/// One z-Fourier block visited by the block route.
struct BlockSummary {
  BlockLabel m;
  double lower_bound = 0;
  std::size_t dimension = 0;
  bool solved = false;
  bool converged = true;
  int iterations = 0;
  std::string method;
  std::vector<double> values;
};

struct SpectrumResult {
  std::vector<double> values;  // nondecreasing
  Parity parity = Parity::full;
  Scheme scheme;
  int n = 0;
  double tol = 0;
  std::uint64_t seed = 0;
  std::size_t dimension = 0;  // dimension of the space the eigenvalues belong to
  bool complete = false;      // values is the whole spectrum of that space
  bool converged = true;
  double max_residual = 0;    // max ||A v - lambda v|| / max(1, |lambda|)
  std::string method;
  std::vector<BlockSummary> blocks;
};

/// Number of grid points fixed by the alpha-involution: N^2 * 4 * 2 * 2 when 4 | N, else 0.
inline std::size_t parity_fixed_count(int n)
{
  if (n % 4 != 0)
    return 0;
  return static_cast<std::size_t>(n) * n * 16;
}

inline std::size_t parity_dimension(int n, Parity p)
{
  std::size_t total = 1;
  for (int i = 0; i < kDim; ++i)
    total *= static_cast<std::size_t>(n);
  if (p == Parity::full)
    return total;
  std::size_t f = parity_fixed_count(n);
  return p == Parity::even ? (total + f) / 2 : (total - f) / 2;
}

struct PartialSpectrum {
  std::vector<double> values;
  bool converged = true;
  int iterations = 0;
  double max_residual = 0;
  std::string method;
};

/// The k smallest eigenvalues of a Hermitian CSR matrix; LAPACK for small sizes, LOBPCG otherwise.
template <class Scalar>
PartialSpectrum smallest_eigenvalues(const CsrMatrix<Scalar>& a, int k, const SolverOptions& opt, std::uint64_t seed)
{
  if (k < 1)
    throw std::invalid_argument("need k >= 1 eigenvalues");
  PartialSpectrum out;
  const std::size_t want = std::min<std::size_t>(static_cast<std::size_t>(k), a.n);
  if (a.n <= opt.dense_limit || 3 * (want + std::max<std::size_t>(8, want / 2)) > a.n) {
    std::vector<double> all = hermitian_eigenvalues<Scalar>(a.to_dense());
    out.values.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(want));
    out.method = "dense";
    return out;
  }
  LobpcgOptions lo;
  lo.nev = static_cast<int>(want);
  lo.tol = opt.tol;
  lo.max_iter = opt.max_iter;
  lo.seed = seed;
  BlockOperator<Scalar> op = [&a](const DenseMatrix<Scalar>& x, DenseMatrix<Scalar>& y) { a.apply(x, y); };
  LobpcgResult<Scalar> r = lobpcg<Scalar>(op, a.n, make_preconditioner(a, opt.precond), lo);
  out.values = r.values;
  out.converged = r.converged;
  out.iterations = r.iterations;
  for (std::size_t j = 0; j < r.values.size(); ++j)
    out.max_residual = std::max(out.max_residual, r.residuals[j] / std::max(1.0, std::abs(r.values[j])));
  out.method = "lobpcg-" + to_string(opt.precond);
  return out;
}

/// Deterministic per-block seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt)
{
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Every eigenvalue of the full operator by dense diagonalization.
inline SpectrumResult dense_full_spectrum(const DiscreteOperator& a)
{
  if (a.size() > 20000)
    throw std::length_error("dense_full_spectrum is limited to N^6 <= 20000 (N <= 5 in practice; use N=4)");
  SpectrumResult out;
  out.values = hermitian_eigenvalues<double>(a.to_csr().to_dense());
  out.parity = Parity::full;
  out.scheme = a.scheme();
  out.n = a.n();
  out.dimension = a.size();
  out.complete = true;
  out.method = "dense";
  return out;
}

/// Every eigenvalue of the operator restricted to one alpha-eigenspace, by dense diagonalization.
inline SpectrumResult dense_parity_spectrum(const DiscreteOperator& a, Parity parity)
{
  if (parity == Parity::full)
    return dense_full_spectrum(a);
  if (a.size() > 20000)
    throw std::length_error("dense_parity_spectrum is limited to N^6 <= 20000");
  ParityOperator u(a.grid());
  auto basis = eigenspace_basis(u.as_signed(), parity_sign(parity));
  SpectrumResult out;
  out.values = hermitian_eigenvalues<double>(restrict_to(a.to_csr(), basis).to_dense());
  out.parity = parity;
  out.scheme = a.scheme();
  out.n = a.n();
  out.dimension = basis.dim();
  out.complete = true;
  out.method = "dense-projected";
  return out;
}

/// The k smallest eigenvalues of the full operator (no parity split).
inline SpectrumResult eigs_smallest(const DiscreteOperator& a, int k, const SolverOptions& opt)
{
  PartialSpectrum p = smallest_eigenvalues<double>(assembled_csr(a, opt.cache), k, opt, opt.seed);
  SpectrumResult out;
  out.values = std::move(p.values);
  out.parity = Parity::full;
  out.scheme = a.scheme();
  out.n = a.n();
  out.tol = opt.tol;
  out.seed = opt.seed;
  out.dimension = a.size();
  out.complete = out.values.size() == a.size();
  out.converged = p.converged;
  out.max_residual = p.max_residual;
  out.method = p.method;
  return out;
}

/**
 * Smallest eigenvalues on one alpha-eigenspace, computed on the full grid:
 * the operator is restricted to the orthonormal orbit basis of U and handed
 * to the sparse solver. Independent of the z-Fourier reduction; used as its
 * cross-check on small grids.
 */
inline SpectrumResult orbifold_spectrum_direct(const DiscreteOperator& a, int k, Parity parity, const SolverOptions& opt)
{
  if (parity == Parity::full)
    return eigs_smallest(a, k, opt);
  ParityOperator u(a.grid());
  auto basis = eigenspace_basis(u.as_signed(), parity_sign(parity));
  PartialSpectrum p = smallest_eigenvalues<double>(restrict_to(assembled_csr(a, opt.cache), basis), k, opt, opt.seed);
  SpectrumResult out;
  out.values = std::move(p.values);
  out.parity = parity;
  out.scheme = a.scheme();
  out.n = a.n();
  out.tol = opt.tol;
  out.seed = opt.seed;
  out.dimension = basis.dim();
  out.converged = p.converged;
  out.max_residual = p.max_residual;
  out.method = "direct-" + p.method;
  return out;
}

/// How orbifold_spectrum splits the operator before solving.
enum class Route {
  pieces,   // z-Fourier blocks further split by y-mode cosets (real, five nonzeros per row)
  z_blocks  // z-Fourier blocks only (complex, four-dimensional stencils)
};

inline std::string to_string(Route r) { return r == Route::pieces ? "pieces" : "z-blocks"; }

namespace detail {

/// A solvable unit of the reduction, with a rigorous lower bound on its spectrum.
struct SpectralUnit {
  BlockLabel m;
  std::uint64_t id = 0;
  double bound = 0;
  std::size_t dimension = 0;
  int copies = 1;
  std::function<PartialSpectrum(int, const SolverOptions&, std::uint64_t)> solve;
};

inline long label_id(BlockLabel m, int n) { return static_cast<long>(m.m1) * n + m.m2; }

inline std::vector<BlockLabel> block_representatives(int n)
{
  std::vector<BlockLabel> out;
  for (int m1 = 0; m1 < n; ++m1)
    for (int m2 = 0; m2 < n; ++m2) {
      BlockLabel m{m1, m2};
      if (label_id(negate(m, n), n) >= label_id(m, n))
        out.push_back(m);
    }
  return out;
}

inline std::vector<SpectralUnit> z_block_units(const DiscreteOperator& a, const ParityOperator& u, Parity parity)
{
  const int n = a.n();
  std::vector<SpectralUnit> units;
  for (BlockLabel m : block_representatives(n)) {
    SpectralUnit su;
    su.m = m;
    su.id = static_cast<std::uint64_t>(label_id(m, n));
    su.bound = block_lower_bound(a, m);
    if (self_conjugate(m, n)) {
      if (parity == Parity::full) {
        su.dimension = a.size() / (static_cast<std::size_t>(n) * n);
        su.solve = [&a, m](int k, const SolverOptions& o, std::uint64_t seed) {
          return smallest_eigenvalues<double>(z_block<double>(a, m), k, o, seed);
        };
      } else {
        auto basis = std::make_shared<EigenspaceBasis<double>>(
            eigenspace_basis(block_parity<double>(u, m), parity_sign(parity)));
        su.dimension = basis->dim();
        su.solve = [&a, m, basis](int k, const SolverOptions& o, std::uint64_t seed) {
          return smallest_eigenvalues<double>(restrict_to(z_block<double>(a, m), *basis), k, o, seed);
        };
      }
    } else {
      su.dimension = a.size() / (static_cast<std::size_t>(n) * n);
      su.copies = parity == Parity::full ? 2 : 1;
      su.solve = [&a, m](int k, const SolverOptions& o, std::uint64_t seed) {
        return smallest_eigenvalues<std::complex<double>>(z_block<std::complex<double>>(a, m), k, o, seed);
      };
    }
    units.push_back(std::move(su));
  }
  return units;
}

/**
 * Pieces (m, C) and (-m, -C) are exchanged by alpha. A pair contributes its
 * spectrum once per parity; a piece with m = -m and C = -C is restricted to
 * the eigenspace of its own involution.
 */
inline std::vector<SpectralUnit> piece_units(const DiscreteOperator& a, Parity parity)
{
  const int n = a.n();
  std::vector<SpectralUnit> units;
  for (BlockLabel m : block_representatives(n)) {
    const bool sc_block = self_conjugate(m, n);
    for (const auto& coset : mode_cosets(m, n)) {
      const std::vector<Mode> neg = negate(coset, n);
      const bool fixed = sc_block && neg == coset;
      if (sc_block && !fixed && neg < coset)
        continue;  // partner (m, -C) is enumerated instead
      SpectralUnit su;
      su.m = m;
      su.id = static_cast<std::uint64_t>(label_id(m, n)) * n * n + static_cast<std::uint64_t>(coset[0][0]) * n +
              static_cast<std::uint64_t>(coset[0][1]);
      su.bound = piece_lower_bound(a, m, coset);
      const std::size_t dim = static_cast<std::size_t>(n) * n * coset.size();
      auto cs = std::make_shared<std::vector<Mode>>(coset);
      const std::string tag = "piece-" + std::to_string(m.m1) + "-" + std::to_string(m.m2) + "-" +
                              std::to_string(coset[0][0]) + "-" + std::to_string(coset[0][1]);
      auto matrix = [&a, m, cs, tag](const SolverOptions& o) {
        if (!o.cache)
          return piece_matrix(a, m, *cs);
        CacheKey key{a.scheme().family, a.scheme().param, a.n(), Scheme::version, tag};
        return o.cache->load_or_build(key, [&] { return piece_matrix(a, m, *cs); });
      };
      if (fixed && parity != Parity::full) {
        auto basis = std::make_shared<EigenspaceBasis<double>>(
            eigenspace_basis(piece_parity(m, coset, n), parity_sign(parity)));
        su.dimension = basis->dim();
        su.solve = [matrix, basis](int k, const SolverOptions& o, std::uint64_t seed) {
          return smallest_eigenvalues<double>(restrict_to(matrix(o), *basis), k, o, seed);
        };
      } else {
        su.dimension = dim;
        su.copies = (!fixed && parity == Parity::full) ? 2 : 1;
        su.solve = [matrix](int k, const SolverOptions& o, std::uint64_t seed) {
          return smallest_eigenvalues<double>(matrix(o), k, o, seed);
        };
      }
      units.push_back(std::move(su));
    }
  }
  return units;
}

} // namespace detail

/**
 * Smallest eigenvalues on one alpha-eigenspace (or the full spectrum) through
 * the exact z-Fourier reduction. Units are visited in order of their lower
 * bound and skipped once that bound exceeds the current k-th smallest value,
 * so the result equals the k smallest eigenvalues of the whole space.
 */
inline SpectrumResult orbifold_spectrum(const Scheme& scheme, int n, int k, Parity parity, const SolverOptions& opt,
                                        Route route = Route::pieces)
{
  require_even_grid(n);
  if (k < 1)
    throw std::invalid_argument("need k >= 1 eigenvalues");
  DiscreteOperator a(scheme, n);
  ParityOperator u(a.grid());
  std::vector<detail::SpectralUnit> units =
      route == Route::pieces ? detail::piece_units(a, parity) : detail::z_block_units(a, u, parity);
  std::stable_sort(units.begin(), units.end(), [](const auto& x, const auto& y) {
    return x.bound != y.bound ? x.bound < y.bound : x.id < y.id;
  });

  SpectrumResult out;
  out.parity = parity;
  out.scheme = scheme;
  out.n = n;
  out.tol = opt.tol;
  out.seed = opt.seed;
  out.dimension = parity_dimension(n, parity);
  out.method = to_string(route);

  std::vector<double> collected;
  for (const auto& su : units) {
    BlockSummary s;
    s.m = su.m;
    s.lower_bound = su.bound;
    s.dimension = su.dimension;
    if (collected.size() >= static_cast<std::size_t>(k)) {
      std::vector<double> tmp = collected;
      std::nth_element(tmp.begin(), tmp.begin() + (k - 1), tmp.end());
      double cutoff = tmp[static_cast<std::size_t>(k - 1)];
      if (su.bound > cutoff * (1 + 1e-9) + 1e-9)
        continue;
    }
    if (su.dimension == 0)
      continue;
    PartialSpectrum p = su.solve(k, opt, mix_seed(opt.seed, su.id));
    s.solved = true;
    s.converged = p.converged;
    s.iterations = p.iterations;
    s.method = p.method;
    s.values = p.values;
    out.converged = out.converged && p.converged;
    out.max_residual = std::max(out.max_residual, p.max_residual);
    for (int r = 0; r < su.copies; ++r)
      collected.insert(collected.end(), p.values.begin(), p.values.end());
    out.blocks.push_back(std::move(s));
  }
  std::sort(collected.begin(), collected.end());
  if (collected.size() > static_cast<std::size_t>(k))
    collected.resize(static_cast<std::size_t>(k));
  out.values = std::move(collected);
  out.complete = out.values.size() == out.dimension;
  return out;
}

/// Orbifold spectrum of the non-almost-inner control family z2 <- z2 + s y1.
inline SpectrumResult control_deformation_spectrum(double s, int n, int k, Parity parity, const SolverOptions& opt,
                                                   Route route = Route::pieces)
{
  return orbifold_spectrum(Scheme{MetricFamily::control, s}, n, k, parity, opt, route);
}

/// All N^6 values sum_i 4 N^2 sin^2(pi m_i / N) of the plainly periodic grid Laplacian, sorted.
inline std::vector<double> flat_torus_closed_form(int n)
{
  std::vector<double> one(static_cast<std::size_t>(n));
  for (int m = 0; m < n; ++m) {
    double s = std::sin(std::numbers::pi * m / n);
    one[m] = 4.0 * n * n * s * s;
  }
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(std::pow(n, kDim)));
  std::array<int, kDim> m{};
  while (true) {
    double v = 0;
    for (int i = 0; i < kDim; ++i)
      v += one[m[i]];
    out.push_back(v);
    int i = kDim - 1;
    while (i >= 0 && ++m[i] == n)
      m[i--] = 0;
    if (i < 0)
      break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct HeatTrace {
  std::vector<double> tau;
  std::vector<double> trace;
  std::vector<double> truncation_bound;  // bound on the omitted tail; 0 for complete spectra
  std::size_t included = 0;
  std::size_t dimension = 0;
};

/// sum_k exp(-tau lambda_k); for truncated spectra the tail is bounded by exp(-tau lambda_max) (dim - k).
inline HeatTrace heat_trace(const SpectrumResult& spec, const std::vector<double>& taus)
{
  if (spec.values.empty())
    throw std::invalid_argument("heat_trace of an empty spectrum");
  HeatTrace h;
  h.tau = taus;
  h.included = spec.values.size();
  h.dimension = spec.dimension;
  const double lmax = spec.values.back();
  const double missing = spec.complete ? 0.0 : static_cast<double>(spec.dimension - spec.values.size());
  for (double tau : taus) {
    if (tau < 0)
      throw std::invalid_argument("heat_trace needs tau >= 0");
    double s = 0;
    for (double l : spec.values)
      s += std::exp(-tau * l);
    h.trace.push_back(s);
    h.truncation_bound.push_back(missing * std::exp(-tau * lmax));
  }
  return h;
}

inline std::string format_double(double v)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_spectrum_csv(std::ostream& os, const std::vector<SpectrumResult>& results)
{
  os << "t,N,parity,index,eigenvalue\n";
  for (const auto& r : results)
    for (std::size_t i = 0; i < r.values.size(); ++i)
      os << format_double(r.scheme.param) << ',' << r.n << ',' << to_string(r.parity) << ',' << i << ','
         << format_double(r.values[i]) << '\n';
}

struct LabeledHeatTrace {
  double t = 0;
  int n = 0;
  HeatTrace trace;
};

inline void write_heat_trace_csv(std::ostream& os, const std::vector<LabeledHeatTrace>& traces)
{
  os << "t,N,tau,trace,truncation_bound\n";
  for (const auto& lt : traces)
    for (std::size_t i = 0; i < lt.trace.tau.size(); ++i)
      os << format_double(lt.t) << ',' << lt.n << ',' << format_double(lt.trace.tau[i]) << ','
         << format_double(lt.trace.trace[i]) << ',' << format_double(lt.trace.truncation_bound[i]) << '\n';
}

} // namespace orbispec
