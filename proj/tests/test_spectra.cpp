#include "orbispec/compare.hpp"
#include "orbispec/spectrum.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <numbers>
#include <sstream>

using namespace orbispec;

namespace {

void expect_close(const std::vector<double>& a, const std::vector<double>& b, double tol, const std::string& what)
{
  ASSERT_EQ(a.size(), b.size()) << what;
  for (std::size_t i = 0; i < a.size(); ++i)
    ASSERT_LE(std::abs(a[i] - b[i]), tol * std::max(1.0, std::abs(b[i]))) << what << " index " << i;
}

std::vector<double> head(const std::vector<double>& v, std::size_t k) { return {v.begin(), v.begin() + k}; }

} // namespace

TEST(Spectrum, PiecesMatchDenseAtN4)
{
  SolverOptions opt;
  for (auto scheme : {Scheme{MetricFamily::almost_inner, 0.25}, Scheme{MetricFamily::control, 0.25}}) {
    DiscreteOperator a(scheme, 4);
    for (Parity p : {Parity::even, Parity::odd, Parity::full}) {
      SpectrumResult dense = p == Parity::full ? dense_full_spectrum(a) : dense_parity_spectrum(a, p);
      SpectrumResult red = orbifold_spectrum(scheme, 4, 40, p, opt);
      expect_close(red.values, head(dense.values, 40), 1e-9, scheme.str() + " " + to_string(p));
      EXPECT_EQ(red.dimension, dense.values.size());
    }
  }
}

TEST(Spectrum, PiecesMatchZBlocksAtN6)
{
  SolverOptions opt;
  Scheme s{MetricFamily::almost_inner, 0.25};
  SpectrumResult a = orbifold_spectrum(s, 6, 20, Parity::even, opt, Route::pieces);
  SpectrumResult b = orbifold_spectrum(s, 6, 20, Parity::even, opt, Route::z_blocks);
  expect_close(a.values, b.values, 1e-9, "pieces vs z-blocks");
  EXPECT_LE(std::abs(a.values[0]), 1e-8);
}

TEST(Spectrum, DirectProjectionMatchesPiecesAtN4)
{
  SolverOptions opt;
  opt.dense_limit = 0;  // force LOBPCG on the projected full-grid operator
  Scheme s{MetricFamily::almost_inner, 0.25};
  SpectrumResult direct = orbifold_spectrum_direct(DiscreteOperator(s, 4), 12, Parity::even, opt);
  EXPECT_TRUE(direct.converged);
  SpectrumResult red = orbifold_spectrum(s, 4, 12, Parity::even, SolverOptions{});
  expect_close(direct.values, red.values, 1e-7, "direct vs pieces");
}

TEST(Spectrum, LobpcgMatchesDenseOnAPiece)
{
  DiscreteOperator a(Scheme{MetricFamily::almost_inner, 0.25}, 6);
  BlockLabel m{0, 1};
  auto cosets = mode_cosets(m, 6);
  CsrMatrix<double> piece = piece_matrix(a, m, cosets[0]);
  std::vector<double> all = hermitian_eigenvalues<double>(piece.to_dense());
  SolverOptions opt;
  opt.dense_limit = 0;
  PartialSpectrum p = smallest_eigenvalues<double>(piece, 6, opt, 3);
  EXPECT_EQ(p.method, "lobpcg-jacobi");
  EXPECT_TRUE(p.converged);
  expect_close(p.values, head(all, 6), 1e-7, "lobpcg");
  opt.precond = Preconditioner::shifted_ldlt;
  PartialSpectrum q = smallest_eigenvalues<double>(piece, 6, opt, 3);
  EXPECT_TRUE(q.converged);
  expect_close(q.values, head(all, 6), 1e-7, "lobpcg ldlt");
}

TEST(Spectrum, FlatModeSmallestThirteen)
{
  SolverOptions opt;
  opt.dense_limit = 0;
  SpectrumResult r = eigs_smallest(DiscreteOperator(Scheme{MetricFamily::flat, 0.0}, 4), 13, opt);
  ASSERT_TRUE(r.converged);
  ASSERT_EQ(r.values.size(), 13u);
  EXPECT_LE(std::abs(r.values[0]), 1e-8);
  for (std::size_t i = 1; i < 13; ++i)
    EXPECT_NEAR(r.values[i], 32.0, 32.0 * 1e-8);
}

TEST(Spectrum, SeedStability)
{
  SolverOptions a, b;
  a.dense_limit = b.dense_limit = 0;
  a.seed = 1;
  b.seed = 99;
  Scheme s{MetricFamily::almost_inner, 0.25};
  SpectrumResult x = orbifold_spectrum(s, 6, 20, Parity::even, a);
  SpectrumResult y = orbifold_spectrum(s, 6, 20, Parity::even, b);
  ASSERT_TRUE(x.converged && y.converged);
  expect_close(x.values, y.values, 10 * a.tol, "seeds");
}

TEST(Spectrum, GroundStateIsSimpleAndZero)
{
  for (double t : {0.0, 0.25, 0.5})
    for (Parity p : {Parity::even, Parity::full}) {
      SpectrumResult r = orbifold_spectrum(Scheme{MetricFamily::almost_inner, t}, 6, 3, p, SolverOptions{});
      EXPECT_LE(std::abs(r.values[0]), 1e-8);
      EXPECT_GT(r.values[1], 1.0);
    }
  SpectrumResult odd = orbifold_spectrum(Scheme{MetricFamily::almost_inner, 0.25}, 6, 3, Parity::odd, SolverOptions{});
  EXPECT_GT(odd.values[0], 1.0);  // constants are even
}

TEST(Spectrum, FlatRefinementIsSecondOrder)
{
  // |lambda_N - lambda| for fixed indices of the flat torus; the continuum values
  // are 4 pi^2 (index 1) and 8 pi^2 (index 13).
  SolverOptions opt;
  Scheme flat{MetricFamily::flat, 0.0};
  SpectrumResult r4 = orbifold_spectrum(flat, 4, 14, Parity::full, opt);
  SpectrumResult r8 = orbifold_spectrum(flat, 8, 14, Parity::full, opt);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  for (auto [index, exact] : {std::pair<int, double>{1, 4 * pi2}, std::pair<int, double>{13, 8 * pi2}}) {
    const double ratio = std::abs(r4.values[index] - exact) / std::abs(r8.values[index] - exact);
    EXPECT_GE(ratio, 3.5) << index;
    EXPECT_LE(ratio, 4.5) << index;
  }
}

TEST(Spectrum, OddGridRejected)
{
  EXPECT_THROW(orbifold_spectrum(Scheme{}, 7, 5, Parity::even, SolverOptions{}), std::invalid_argument);
}

TEST(HeatTrace, Properties)
{
  SpectrumResult r = dense_full_spectrum(DiscreteOperator(Scheme{MetricFamily::almost_inner, 0.25}, 4));
  HeatTrace h = heat_trace(r, {0.0, 0.05, 0.1, 0.2});
  EXPECT_DOUBLE_EQ(h.trace[0], 4096.0);
  for (std::size_t i = 1; i < h.trace.size(); ++i)
    EXPECT_LT(h.trace[i], h.trace[i - 1]);
  EXPECT_EQ(h.truncation_bound[1], 0.0);

  SpectrumResult part = orbifold_spectrum(Scheme{MetricFamily::almost_inner, 0.25}, 6, 20, Parity::even, SolverOptions{});
  HeatTrace t = heat_trace(part, {0.1});
  EXPECT_DOUBLE_EQ(t.truncation_bound[0],
                   static_cast<double>(part.dimension - 20) * std::exp(-0.1 * part.values.back()));
  EXPECT_THROW(heat_trace(SpectrumResult{}, {0.1}), std::invalid_argument);
}

TEST(Compare, IdenticalSpectraHaveZeroGaps)
{
  SpectrumResult a = orbifold_spectrum(Scheme{MetricFamily::almost_inner, 0.0}, 4, 10, Parity::even, SolverOptions{});
  SpectrumResult b = orbifold_spectrum(Scheme{MetricFamily::almost_inner, 0.0}, 6, 10, Parity::even, SolverOptions{});
  GapStudy s = gap_study({{a, a}, {b, b}}, 1e-8);
  EXPECT_TRUE(s.passed());
  for (const auto& g : s.grids)
    for (double v : g.gaps)
      EXPECT_EQ(v, 0.0);
}

TEST(Compare, GateLogic)
{
  auto make = [](int n, std::vector<double> v) {
    SpectrumResult r;
    r.n = n;
    r.values = std::move(v);
    return r;
  };
  // index 1 shrinks by 1/4, index 2 is equal on both grids, index 3 grows
  SpectrumResult c0 = make(6, {0, 10, 20, 30}), c1 = make(6, {0, 11, 20, 30});
  SpectrumResult f0 = make(12, {0, 10, 20, 30}), f1 = make(12, {0, 10.25, 20, 30.1});
  GapStudy s = gap_study({{c0, c1}, {f0, f1}}, 1e-8);
  EXPECT_FALSE(s.per_index_pass);
  ASSERT_EQ(s.steps[0].failing, std::vector<long>{3});
  EXPECT_NEAR(s.steps[0].median_ratio, 0.25 * 11 / 10.25, 1e-12);
  EXPECT_TRUE(s.median_pass);
  EXPECT_TRUE(s.ground_state_pass);

  f1 = make(12, {0, 10.25, 20, 30});
  EXPECT_TRUE(gap_study({{c0, c1}, {f0, f1}}, 1e-8).passed());
  f1 = make(12, {1e-3, 10.25, 20, 30});
  EXPECT_FALSE(gap_study({{c0, c1}, {f0, f1}}, 1e-8).ground_state_pass);
}

TEST(Compare, HeatBandExtrapolation)
{
  GapStudy s;
  s.floor = 1e-7;
  GridGaps a, b;
  a.n = 6;
  a.max_gap = 0.04;
  b.n = 12;
  b.max_gap = 0.01;
  s.grids = {a, b};
  HeatBand band = calibrate_heat_band(s, 4);
  EXPECT_NEAR(band.order, 2.0, 1e-12);
  EXPECT_NEAR(band.eps_target, 0.04 * 2.25, 1e-12);
  EXPECT_NEAR(band.bound({0.0, 10.0}, 0.1), band.eps_target * 0.1 * 10 * std::exp(-1.0), 1e-12);
}

TEST(Cache, RoundTripAndKeyCheck)
{
  const auto dir = std::filesystem::temp_directory_path() / "orbispec_cache_test";
  std::filesystem::remove_all(dir);
  OperatorCache cache(dir);
  DiscreteOperator a(Scheme{MetricFamily::almost_inner, 0.25}, 4);
  CacheKey key{MetricFamily::almost_inner, 0.25, 4, Scheme::version, "full"};
  CsrMatrix<double> built = cache.load_or_build(key, [&] { return a.to_csr(); });
  EXPECT_EQ(cache.misses(), 1);
  CsrMatrix<double> loaded = cache.load_or_build(key, [&] { return CsrMatrix<double>{}; });
  EXPECT_EQ(cache.hits(), 1);
  EXPECT_TRUE(loaded == built);
  CacheKey other = key;
  other.param = 0.5;
  EXPECT_FALSE(cache.load(other).has_value());

  SolverOptions plain, cached;
  cached.cache = &cache;
  SpectrumResult x = orbifold_spectrum(Scheme{MetricFamily::almost_inner, 0.25}, 6, 10, Parity::even, plain);
  SpectrumResult y = orbifold_spectrum(Scheme{MetricFamily::almost_inner, 0.25}, 6, 10, Parity::even, cached);
  SpectrumResult z = orbifold_spectrum(Scheme{MetricFamily::almost_inner, 0.25}, 6, 10, Parity::even, cached);
  EXPECT_EQ(x.values, y.values);
  EXPECT_EQ(y.values, z.values);
  EXPECT_GT(cache.hits(), 1);
  std::filesystem::remove_all(dir);
}

TEST(Csv, Format)
{
  SpectrumResult r;
  r.scheme = Scheme{MetricFamily::almost_inner, 0.25};
  r.n = 6;
  r.parity = Parity::even;
  r.values = {0.0, 36.0};
  std::ostringstream os;
  write_spectrum_csv(os, {r});
  EXPECT_EQ(os.str(), "t,N,parity,index,eigenvalue\n0.25,6,even,0,0\n0.25,6,even,1,36\n");
}
