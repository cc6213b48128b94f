#pragma once

#include "orbispec/group.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace orbispec {

using GridIndex = std::array<long, kDim>;

/// How the quotient identifies grid indices that leave [0, N).
enum class Wrap {
  shear,  // x ~ gamma x for lattice gamma: wrapping x shifts the z-indices
  plain   // ordinary torus
};

inline long floor_div(long a, long n)
{
  long q = a / n;
  if ((a % n != 0) && ((a < 0) != (n < 0)))
    --q;
  return q;
}

inline long mod(long a, long n) { return a - n * floor_div(a, n); }

/**
 * Index space {0..N-1}^6 of the fundamental domain [0,1)^6 with spacing
 * h = 1/N. Linear order is row-major in (x1, x2, y1, y2, z1, z2), so the
 * N^2 z-indices of a fixed (x, y) are contiguous.
 */
class QuotientGrid {
public:
  QuotientGrid(int n, Wrap wrap = Wrap::shear) : n_(n), wrap_(wrap)
  {
    if (n < 2)
      throw std::invalid_argument("grid needs N >= 2");
    size_ = 1;
    for (int i = 0; i < kDim; ++i)
      size_ *= static_cast<std::size_t>(n);
  }

  int n() const { return n_; }
  Wrap wrap() const { return wrap_; }
  double h() const { return 1.0 / n_; }
  std::size_t size() const { return size_; }

  std::size_t linear(const GridIndex& idx) const
  {
    std::size_t lin = 0;
    for (int i = 0; i < kDim; ++i)
      lin = lin * n_ + static_cast<std::size_t>(idx[i]);
    return lin;
  }

  GridIndex unlinear(std::size_t lin) const
  {
    GridIndex idx{};
    for (int i = kDim - 1; i >= 0; --i) {
      idx[i] = static_cast<long>(lin % n_);
      lin /= n_;
    }
    return idx;
  }

  bool in_range(const GridIndex& idx) const
  {
    for (long v : idx)
      if (v < 0 || v >= n_)
        return false;
    return true;
  }

  /**
   * Representative in [0,N)^6. Under shear wrap, moving x1 down by q
   * periods applies gamma^{-q} with gamma = (1,0,0,0,0,0), which sends
   * (l1, l2) to (l1 - q k1, l2 - q k2); moving x2 down by q sends l1 to
   * l1 - q k2. The y- and z-indices then wrap plainly.
   */
  GridIndex canonical(GridIndex idx) const
  {
    if (wrap_ == Wrap::shear) {
      long q1 = floor_div(idx[X1], n_);
      long q2 = floor_div(idx[X2], n_);
      idx[X1] -= q1 * n_;
      idx[X2] -= q2 * n_;
      idx[Z1] -= q1 * idx[Y1] + q2 * idx[Y2];
      idx[Z2] -= q1 * idx[Y2];
    }
    for (int i = 0; i < kDim; ++i)
      idx[i] = mod(idx[i], n_);
    return idx;
  }

  /// One wrap step of a single x-coordinate, for confluence checks.
  GridIndex reduce_x_once(GridIndex idx, int coord) const
  {
    if (coord != X1 && coord != X2)
      throw std::invalid_argument("reduce_x_once takes X1 or X2");
    long q = floor_div(idx[coord], n_);
    if (q == 0)
      return idx;
    idx[coord] -= q * n_;
    if (wrap_ == Wrap::shear) {
      if (coord == X1) {
        idx[Z1] -= q * idx[Y1];
        idx[Z2] -= q * idx[Y2];
      } else {
        idx[Z1] -= q * idx[Y2];
      }
    }
    return idx;
  }

  /// Global coordinates i/N of an index (no wrapping).
  std::array<double, kDim> coordinates(const GridIndex& idx) const
  {
    std::array<double, kDim> c{};
    for (int i = 0; i < kDim; ++i)
      c[i] = static_cast<double>(idx[i]) / n_;
    return c;
  }

private:
  int n_;
  Wrap wrap_;
  std::size_t size_;
};

} // namespace orbispec
