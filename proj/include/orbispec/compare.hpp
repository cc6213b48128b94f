#pragma once

#include "orbispec/spectrum.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace orbispec {

/// |a - b| / max(1, |a|, |b|)
inline double relative_gap(double a, double b)
{
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

/// Elementwise relative gaps between two spectra on the same grid.
struct GridGaps {
  int n = 0;
  std::vector<double> reference;  // spectrum at the first parameter
  std::vector<double> deformed;   // spectrum at the second parameter
  std::vector<double> gaps;
  double max_gap = 0;
};

inline GridGaps grid_gaps(const SpectrumResult& a, const SpectrumResult& b)
{
  if (a.n != b.n)
    throw std::invalid_argument("grid_gaps: spectra come from different grids");
  GridGaps g;
  g.n = a.n;
  g.reference = a.values;
  g.deformed = b.values;
  const std::size_t k = std::min(a.values.size(), b.values.size());
  for (std::size_t i = 0; i < k; ++i) {
    g.gaps.push_back(relative_gap(a.values[i], b.values[i]));
    g.max_gap = std::max(g.max_gap, g.gaps.back());
  }
  return g;
}

/// One coarse -> fine refinement step of the gap study.
struct RefinementStep {
  int coarse = 0;
  int fine = 0;
  std::vector<double> ratio;      // fine gap / coarse gap; NaN where the coarse gap is at the noise floor
  std::vector<bool> shrinks;      // strictly smaller, or both gaps at the noise floor
  std::vector<long> failing;      // indices violating the per-eigenvalue rule
  double median_ratio = std::numeric_limits<double>::quiet_NaN();
  long ratios_used = 0;
};

/**
 * Gap study across a grid ladder. A gap at or below the noise floor (10 tol)
 * on both grids counts as shrinking: such eigenvalues are already equal to
 * solver accuracy and there is nothing left to converge.
 */
struct GapStudy {
  double floor = 0;
  std::vector<GridGaps> grids;
  std::vector<RefinementStep> steps;
  bool per_index_pass = true;
  bool median_pass = true;
  bool ground_state_pass = true;
  double median_limit = 0.5;

  bool passed() const { return per_index_pass && median_pass && ground_state_pass; }
};

inline double median(std::vector<double> v)
{
  if (v.empty())
    return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

/**
 * spectra[g][j]: spectrum at grid g (ascending N) and parameter j (two
 * parameters). Ground-state check: lambda_0 <= tol in every run.
 */
inline GapStudy gap_study(const std::vector<std::array<SpectrumResult, 2>>& spectra, double tol,
                          double median_limit = 0.5)
{
  if (spectra.size() < 2)
    throw std::invalid_argument("gap_study needs at least two grids");
  GapStudy s;
  s.floor = 10 * tol;
  s.median_limit = median_limit;
  for (const auto& pair : spectra) {
    s.grids.push_back(grid_gaps(pair[0], pair[1]));
    for (const auto& r : pair)
      if (r.values.empty() || std::abs(r.values[0]) > tol)
        s.ground_state_pass = false;
  }
  for (std::size_t g = 0; g + 1 < s.grids.size(); ++g) {
    const GridGaps& c = s.grids[g];
    const GridGaps& f = s.grids[g + 1];
    RefinementStep st;
    st.coarse = c.n;
    st.fine = f.n;
    const std::size_t k = std::min(c.gaps.size(), f.gaps.size());
    std::vector<double> used;
    for (std::size_t i = 0; i < k; ++i) {
      const bool both_floor = c.gaps[i] <= s.floor && f.gaps[i] <= s.floor;
      const bool ok = both_floor || f.gaps[i] < c.gaps[i];
      st.shrinks.push_back(ok);
      if (!ok)
        st.failing.push_back(static_cast<long>(i));
      if (c.gaps[i] > s.floor) {
        st.ratio.push_back(f.gaps[i] / c.gaps[i]);
        used.push_back(st.ratio.back());
      } else {
        st.ratio.push_back(std::numeric_limits<double>::quiet_NaN());
      }
    }
    st.ratios_used = static_cast<long>(used.size());
    st.median_ratio = median(used);
    s.per_index_pass = s.per_index_pass && st.failing.empty();
    // With no gap above the floor on the coarse grid the spectra already agree.
    if (!used.empty() && !(st.median_ratio <= median_limit))
      s.median_pass = false;
    s.steps.push_back(std::move(st));
  }
  return s;
}

/**
 * Relative eigenvalue error band at a target grid, extrapolated from the
 * coarsest step of a gap study: eps(N) = eps(coarse) (coarse / N)^p with p
 * the observed order of the largest gap. When the fine gap has vanished the
 * nominal order 2 is used.
 */
struct HeatBand {
  int coarse = 0;
  int fine = 0;
  double eps_coarse = 0;
  double eps_fine = 0;
  double order = 2;
  int target = 0;
  double eps_target = 0;

  /// First-order bound on |sum exp(-tau l) - sum exp(-tau l')| when |l - l'| <= eps l.
  double bound(const std::vector<double>& values, double tau) const
  {
    double s = 0;
    for (double l : values)
      s += std::abs(l) * std::exp(-tau * l);
    return eps_target * tau * s;
  }
};

inline HeatBand calibrate_heat_band(const GapStudy& study, int target)
{
  if (study.grids.size() < 2)
    throw std::invalid_argument("calibrate_heat_band needs a two-grid study");
  HeatBand b;
  b.coarse = study.grids[0].n;
  b.fine = study.grids[1].n;
  b.eps_coarse = study.grids[0].max_gap;
  b.eps_fine = study.grids[1].max_gap;
  if (b.eps_fine > study.floor && b.eps_coarse > study.floor)
    b.order = std::log(b.eps_coarse / b.eps_fine) / std::log(static_cast<double>(b.fine) / b.coarse);
  b.target = target;
  b.eps_target = b.eps_coarse * std::pow(static_cast<double>(b.coarse) / target, b.order);
  return b;
}

/// CSV `t_a,t_b,N,parity,index,eigenvalue_a,eigenvalue_b,relative_gap`.
inline void write_gap_csv(std::ostream& os, double ta, double tb, Parity parity, const std::vector<GridGaps>& grids)
{
  os << "t_a,t_b,N,parity,index,eigenvalue_a,eigenvalue_b,relative_gap\n";
  for (const auto& g : grids)
    for (std::size_t i = 0; i < g.gaps.size(); ++i)
      os << format_double(ta) << ',' << format_double(tb) << ',' << g.n << ',' << to_string(parity) << ',' << i
         << ',' << format_double(g.reference[i]) << ',' << format_double(g.deformed[i]) << ','
         << format_double(g.gaps[i]) << '\n';
}

} // namespace orbispec
