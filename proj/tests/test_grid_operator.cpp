#include "orbispec/fixed_points.hpp"
#include "orbispec/spectrum.hpp"

#include <gtest/gtest.h>

using namespace orbispec;

namespace {

GroupElement grid_point(const GridIndex& idx, int n)
{
  return GroupElement(make_rational(idx[0], n), make_rational(idx[1], n), make_rational(idx[2], n),
                      make_rational(idx[3], n), make_rational(idx[4], n), make_rational(idx[5], n));
}

} // namespace

TEST(Grid, CanonicalExamples)
{
  QuotientGrid g(6);
  GridIndex in{1, 2, 3, 4, 5, 0};
  EXPECT_EQ(g.canonical(in), in);
  EXPECT_EQ(g.canonical(GridIndex{6, 0, 2, 5, 1, 3}), (GridIndex{0, 0, 2, 5, 5, 4}));
  for (std::size_t lin = 0; lin < g.size(); lin += 997) {
    GridIndex p = g.unlinear(lin);
    EXPECT_EQ(g.linear(p), lin);
    GridIndex shifted{p[0] + 6, p[1] - 12, p[2] + 6, p[3], p[4] - 6, p[5] + 18};
    GridIndex c = g.canonical(shifted);
    EXPECT_TRUE(g.in_range(c));
    EXPECT_EQ(g.canonical(c), c);
  }
}

TEST(Grid, CanonicalIsTheLatticeAction)
{
  // Oracle: the representative c of p must satisfy c = gamma p for a lattice gamma.
  const int n = 4;
  QuotientGrid g(n);
  for (long a = -1; a <= 1; ++a)
    for (long b = -1; b <= 1; ++b)
      for (std::size_t lin = 0; lin < g.size(); lin += 37) {
        GridIndex p = g.unlinear(lin);
        p[0] += a * n;
        p[1] += b * n;
        p[2] += (a - b) * n;
        p[5] -= 2 * a * n;
        GridIndex c = g.canonical(p);
        GroupElement gamma = mul(grid_point(c, n), inverse(grid_point(p, n)));
        ASSERT_TRUE(gamma.is_lattice()) << gamma.str();
      }
}

TEST(Grid, ConfluenceExhaustiveAtN2)
{
  const int n = 2;
  QuotientGrid g(n);
  for (std::size_t lin = 0; lin < g.size(); ++lin) {
    const GridIndex base = g.unlinear(lin);
    for (int i = 0; i < kDim; ++i)
      for (int j = i + 1; j < kDim; ++j)
        for (int si : {-1, 1})
          for (int sj : {-1, 1}) {
            GridIndex p = base;
            p[i] += si * n;
            p[j] += sj * n;
            GridIndex a = g.canonical(g.reduce_x_once(g.reduce_x_once(p, X1), X2));
            GridIndex b = g.canonical(g.reduce_x_once(g.reduce_x_once(p, X2), X1));
            ASSERT_EQ(a, b);
            ASSERT_EQ(a, g.canonical(p));
          }
  }
}

TEST(Operator, RejectsBadGrids)
{
  EXPECT_THROW(DiscreteOperator(Scheme{}, 5), std::invalid_argument);
  EXPECT_THROW(DiscreteOperator(Scheme{}, 2), std::invalid_argument);
  try {
    ParityOperator u(QuotientGrid(7));
    FAIL() << "odd grid accepted";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("N=8"), std::string::npos);
  }
}

TEST(Operator, SymmetricZeroRowSumsAndCommutesWithParity)
{
  for (auto scheme : {Scheme{MetricFamily::almost_inner, 0.0}, Scheme{MetricFamily::almost_inner, 0.25},
                      Scheme{MetricFamily::almost_inner, 0.7}, Scheme{MetricFamily::control, 0.25},
                      Scheme{MetricFamily::flat, 0.0}})
    for (int n : {4, 6}) {
      DiscreteOperator a(scheme, n);
      CsrMatrix<double> m = a.to_csr();
      EXPECT_LE(m.hermitian_defect(), 1e-12) << scheme.str() << " N=" << n;
      EXPECT_LE(m.max_row_sum(), 1e-10) << scheme.str() << " N=" << n;
      ParityOperator u(a.grid());
      EXPECT_TRUE(u.is_involution());
      EXPECT_LE(commutator_max(a, u), 1e-12) << scheme.str() << " N=" << n;
      std::vector<double> ones(a.size(), 1.0), y;
      a.apply(ones, y);
      double worst = 0;
      for (double v : y)
        worst = std::max(worst, std::abs(v));
      EXPECT_LE(worst, 1e-10);
    }
}

TEST(Operator, PositiveSemidefiniteAndTraceIdentity)
{
  for (double t : {0.0, 0.25}) {
    DiscreteOperator a(Scheme{MetricFamily::almost_inner, t}, 4);
    SpectrumResult r = dense_full_spectrum(a);
    ASSERT_EQ(r.values.size(), 4096u);
    EXPECT_GE(r.values.front(), -1e-10);
    double s = 0;
    for (double v : r.values)
      s += v;
    const double tr = a.to_csr().trace();
    EXPECT_LE(std::abs(s - tr), 1e-8 * tr);
  }
}

TEST(Operator, FlatModeMatchesClosedForm)
{
  SpectrumResult r = dense_full_spectrum(DiscreteOperator(Scheme{MetricFamily::flat, 0.0}, 4));
  std::vector<double> exact = flat_torus_closed_form(4);
  ASSERT_EQ(r.values.size(), exact.size());
  for (std::size_t i = 0; i < exact.size(); ++i)
    ASSERT_LE(std::abs(r.values[i] - exact[i]), 1e-10 * std::max(1.0, exact[i])) << i;
}

TEST(Parity, FixedPointsAreTheSingularSetAtN4)
{
  const int n = 4;
  QuotientGrid g(n);
  ParityOperator u(g);
  EXPECT_EQ(u.fixed_points().size(), parity_fixed_count(n));
  std::vector<bool> fixed(g.size(), false);
  for (std::size_t p : u.fixed_points())
    fixed[p] = true;
  for (std::size_t lin = 0; lin < g.size(); ++lin) {
    // Oracle: a grid point is singular iff some element of alpha Gamma fixes it,
    // which by the exact isotropy computation means a stabilizer of order 2.
    const bool singular = isotropy_group(grid_point(g.unlinear(lin), n)).size() == 2;
    ASSERT_EQ(fixed[lin], singular) << lin;
  }
  EXPECT_EQ(ParityOperator(QuotientGrid(6)).fixed_points().size(), 0u);
}

TEST(Parity, SplitSizes)
{
  EXPECT_EQ(parity_dimension(4, Parity::even) + parity_dimension(4, Parity::odd), 4096u);
  DiscreteOperator a(Scheme{MetricFamily::almost_inner, 0.25}, 4);
  SpectrumResult e = dense_parity_spectrum(a, Parity::even);
  SpectrumResult o = dense_parity_spectrum(a, Parity::odd);
  EXPECT_EQ(e.values.size(), parity_dimension(4, Parity::even));
  EXPECT_EQ(e.values.size() + o.values.size(), 4096u);
  std::vector<double> merged = e.values;
  merged.insert(merged.end(), o.values.begin(), o.values.end());
  std::sort(merged.begin(), merged.end());
  SpectrumResult f = dense_full_spectrum(a);
  for (std::size_t i = 0; i < merged.size(); ++i)
    ASSERT_NEAR(merged[i], f.values[i], 1e-10 * std::max(1.0, f.values[i]));
}
