// orbispec command-line runner: algebraic certificates, singular set, spectra and
// the t-comparison study. Exit codes: 0 success, 1 check or convergence failure, 2 usage.

#include "orbispec/orbispec.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace orbispec;
using json = Report::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Spectral parameters accept decimals or p/q; both go through the exact parser first.
double parse_param(const std::string& s)
{
  try {
    return to_double(parse_rational(s));
  } catch (const std::exception& e) {
    throw UsageError("bad parameter '" + s + "': " + e.what());
  }
}

std::vector<double> parse_params(const std::vector<std::string>& v)
{
  std::vector<double> out;
  for (const auto& s : v)
    out.push_back(parse_param(s));
  return out;
}

void check_grids(const std::vector<int>& grids)
{
  if (grids.empty())
    throw UsageError("--grid needs at least one value");
  for (int n : grids) {
    try {
      require_even_grid(n);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
}

void apply_thread_env()
{
  if (const char* env = std::getenv("ORBISPEC_THREADS")) {
    char* end = nullptr;
    long n = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || n < 1)
      throw UsageError("ORBISPEC_THREADS must be a positive integer");
    omp_set_num_threads(static_cast<int>(n));
  }
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void write_text(const std::string& path, const std::string& text)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw std::runtime_error("cannot write " + path);
  out << text;
}

/// Emits the report to --report and, in json format, to stdout.
void emit_report(const Report& rep, const std::string& report_path, bool to_stdout)
{
  const std::string text = rep.to_json().dump(2) + "\n";
  if (!report_path.empty())
    write_text(report_path, text);
  if (to_stdout)
    std::cout << text;
}

void emit_csv(const std::string& csv, const std::string& output_path)
{
  if (output_path.empty())
    std::cout << csv;
  else
    write_text(output_path, csv);
}

// ---------------------------------------------------------------- verify-algebra

struct AlgebraArgs {
  std::string t = "1/4";
  long trials = 1000;
  std::uint64_t seed = 42;
  long bound = 3;
  std::string format = "text";
  std::string report;
};

int run_verify_algebra(const AlgebraArgs& a)
{
  AlgebraConfig c;
  try {
    c.t = parse_rational(a.t);
  } catch (const std::exception& e) {
    throw UsageError("bad --t '" + a.t + "': " + e.what());
  }
  if (a.trials < 1 || a.bound < 1)
    throw UsageError("--trials and --bound must be >= 1");
  c.trials = a.trials;
  c.seed = a.seed;
  c.bound = a.bound;

  Report rep("verify-algebra");
  rep.config() = {{"t", to_string(c.t)}, {"trials", c.trials}, {"seed", c.seed}, {"bound", c.bound}};
  json rows = json::array();
  std::ostringstream text;
  for (const SuiteResult& s : run_algebra_suites(c)) {
    rep.verdict(s.name, s.invariant, s.passed(),
                {{"checks", s.checks}, {"failures", s.failures}, {"applicable", s.applicable}, {"note", s.note}});
    rows.push_back({s.name, s.checks, s.failures, s.applicable});
    text << (s.passed() ? "PASS " : "FAIL ") << s.name << "  checks=" << s.checks << " failures=" << s.failures;
    if (!s.note.empty())
      text << "  (" << s.note << ")";
    text << '\n';
  }
  rep.table("suites", {"suite", "checks", "failures", "applicable"}, rows);
  text << (rep.passed() ? "all suites pass\n" : "some suites FAILED\n");
  if (a.format == "text")
    std::cout << text.str();
  emit_report(rep, a.report, a.format == "json");
  return rep.passed() ? 0 : 1;
}

// ---------------------------------------------------------------- singular-set

struct SingularArgs {
  long bound = 2;
  std::string format = "text";
  std::string report;
};

json singular_json(const SingularSetReport& r)
{
  return {{"bound", r.bound},
          {"elements_enumerated", r.elements_enumerated},
          {"fixed_planes", r.fixed_planes},
          {"admissible_planes", r.admissible_planes},
          {"characterization_violations", r.characterization_violations},
          {"missing_planes", r.missing_planes},
          {"isotropy_failures", r.isotropy_failures},
          {"max_isotropy_order", r.max_isotropy_order},
          {"alpha_fixes_reference_point", r.alpha_fixes_reference_point}};
}

int run_singular_set(const SingularArgs& a)
{
  if (a.bound < 1)
    throw UsageError("--bound must be >= 1");
  Report rep("singular-set");
  rep.config() = {{"bound", a.bound}};
  std::ostringstream text;

  SingularSetReport r = singular_set_report(a.bound);
  rep.verdict("singular_set", "singular_set_report: fixed planes match the closed-form characterization both ways",
              r.passed(), singular_json(r));
  rep.verdict("isotropy_order", "isotropy_group: every stabilizer has order 1 or 2",
              r.isotropy_failures == 0 && r.max_isotropy_order <= 2,
              {{"max_isotropy_order", r.max_isotropy_order}});
  text << (r.passed() ? "PASS" : "FAIL") << " singular set, bound " << a.bound << ": " << r.fixed_planes
       << " fixed planes of " << r.admissible_planes << " admissible, " << r.characterization_violations
       << " violations, " << r.missing_planes << " missing, max isotropy order " << r.max_isotropy_order << '\n';

  // A smaller box must reproduce exactly the admissible planes of its own range.
  if (a.bound > 1) {
    SingularSetReport s = singular_set_report(a.bound - 1);
    bool ok = s.passed() && s.fixed_planes <= r.fixed_planes;
    rep.verdict("monotone_in_bound", "singular_set_report(b - 1) is the subset of admissible planes in its range", ok,
                {{"bound", s.bound}, {"fixed_planes", s.fixed_planes}});
    text << (ok ? "PASS" : "FAIL") << " bound " << s.bound << " is a consistent subset (" << s.fixed_planes
         << " planes)\n";
  }

  BetaDiagnostics b = beta_diagnostics(a.bound);
  json beta = {{"square_is_central_translation", b.square_is_central_translation},
               {"fixed_point_searches", b.fixed_point_searches},
               {"maps_with_fixed_points", b.maps_with_fixed_points},
               {"free_action", b.free_action()},
               {"linear_part_is_automorphism", b.linear_part.is_automorphism},
               {"automorphism_defects", b.linear_part.defects.size()},
               {"closure_checks", b.closure_checks},
               {"closure_failures", b.closure_failures}};
  rep.verdict("beta_square", "beta o beta is left translation by (0,0,0,0,0,1)", b.square_is_central_translation, beta);
  rep.verdict("beta_free", "x -> beta(gamma x) has no fixed point for gamma in the box", b.free_action(), beta);
  rep.verdict("beta_automorphism", "linear part of beta is an automorphism (recorded, expected false)",
              b.linear_part.is_automorphism, beta, false);
  rep.verdict("beta_closure", "beta L_gamma beta^-1 is a left translation (recorded, expected false)",
              b.closure_failures == 0, beta, false);
  text << "beta: square " << (b.square_is_central_translation ? "PASS" : "FAIL") << ", freeness "
       << (b.free_action() ? "PASS" : "FAIL") << ", automorphism " << (b.linear_part.is_automorphism ? "yes" : "no")
       << " (recorded), closure " << (b.closure_failures == 0 ? "yes" : "no") << " (" << b.closure_failures << " of "
       << b.closure_checks << " fail, recorded)\n";

  if (a.format == "text")
    std::cout << text.str();
  emit_report(rep, a.report, a.format == "json");
  return rep.passed() ? 0 : 1;
}

// ---------------------------------------------------------------- shared spectral options

struct SpectralArgs {
  std::vector<int> grid;
  int eigs = 20;
  std::string parity = "even";
  std::uint64_t seed = 0;
  double tol = 1e-8;
  int max_iter = 500;
  std::string route = "pieces";
  std::string precond = "jacobi";
  std::string cache;
  std::string output;
  std::string report;
  std::string format = "csv";

  SolverOptions solver(std::unique_ptr<OperatorCache>& holder) const
  {
    if (!(tol > 0) || max_iter < 1 || eigs < 1)
      throw UsageError("--tol, --max-iter and --eigs must be positive");
    SolverOptions o;
    o.tol = tol;
    o.max_iter = max_iter;
    o.seed = seed;
    try {
      o.precond = parse_preconditioner(precond);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    if (!cache.empty()) {
      holder = std::make_unique<OperatorCache>(cache);
      o.cache = holder.get();
    }
    return o;
  }

  Route route_kind() const
  {
    if (route == "pieces")
      return Route::pieces;
    if (route == "z-blocks")
      return Route::z_blocks;
    throw UsageError("unknown route: " + route);
  }

  Parity parity_kind() const
  {
    try {
      return parse_parity(parity);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }

  json echo() const
  {
    return {{"grid", grid},   {"eigs", eigs},         {"parity", parity}, {"seed", seed},
            {"tol", tol},     {"max_iter", max_iter}, {"route", route},   {"precond", precond},
            {"cache", cache}, {"output", output}};
  }
};

json spectrum_json(const SpectrumResult& r)
{
  json blocks = json::array();
  for (const auto& b : r.blocks)
    if (b.solved)
      blocks.push_back({{"m", {b.m.m1, b.m.m2}},
                        {"dimension", b.dimension},
                        {"lower_bound", b.lower_bound},
                        {"method", b.method},
                        {"iterations", b.iterations},
                        {"converged", b.converged}});
  return {{"family", to_string(r.scheme.family)},
          {"param", r.scheme.param},
          {"N", r.n},
          {"parity", to_string(r.parity)},
          {"dimension", r.dimension},
          {"complete", r.complete},
          {"converged", r.converged},
          {"max_residual", r.max_residual},
          {"method", r.method},
          {"count", r.values.size()},
          {"lambda0", r.values.empty() ? json(nullptr) : json_number(r.values[0])},
          {"units_solved", blocks}};
}

// ---------------------------------------------------------------- spectrum

struct SpectrumArgs : SpectralArgs {
  std::vector<std::string> t{"0"};
  std::string family = "almost-inner";
  bool dense = false;
  bool calibrate = false;
  std::vector<std::string> heat_tau;
  std::string heat_output;
};

int run_calibration(const SpectrumArgs& a, Report& rep, std::ostringstream& csv, const SolverOptions& opt)
{
  json rows = json::array();
  std::vector<SpectrumResult> results;
  for (int n : a.grid) {
    const std::vector<double> exact = flat_torus_closed_form(n);
    SpectrumResult r;
    Scheme flat{MetricFamily::flat, 0.0};
    if (static_cast<std::size_t>(n) * n * n * n * n * n <= 20000)
      r = dense_full_spectrum(DiscreteOperator(flat, n));
    else
      r = orbifold_spectrum(flat, n, a.eigs, Parity::full, opt, a.route_kind());
    double worst = 0;
    for (std::size_t i = 0; i < r.values.size(); ++i)
      worst = std::max(worst, std::abs(r.values[i] - exact[i]) / std::max(1.0, std::abs(exact[i])));
    const double lam1 = 4.0 * n * n * std::pow(std::sin(std::numbers::pi / n), 2);
    long mult = 0;
    for (double v : r.values)
      mult += std::abs(v - lam1) <= 1e-10 * lam1;
    const bool complete = r.complete;
    const double limit = complete ? 1e-10 : 10 * a.tol;
    rep.verdict("flat_calibration_N" + std::to_string(n),
                "flat mode reproduces sum_i 4 N^2 sin^2(pi m_i / N) as a multiset", worst <= limit && r.converged,
                {{"N", n}, {"compared", r.values.size()}, {"complete", complete}, {"max_relative_error", worst},
                 {"limit", limit}, {"lambda1", lam1}, {"lambda1_multiplicity", mult}});
    rows.push_back({n, r.values.size(), worst, lam1, mult});
    results.push_back(std::move(r));
  }
  rep.table("calibration", {"N", "compared", "max_relative_error", "lambda1", "lambda1_multiplicity"}, rows);
  write_spectrum_csv(csv, results);
  return 0;
}

int run_spectrum(const SpectrumArgs& a)
{
  check_grids(a.grid);
  std::unique_ptr<OperatorCache> cache;
  SolverOptions opt = a.solver(cache);
  const Parity parity = a.parity_kind();
  const Route route = a.route_kind();
  MetricFamily family;
  try {
    family = parse_family(a.family);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const std::vector<double> ts = parse_params(a.t);
  const std::vector<double> taus = parse_params(a.heat_tau);
  if (a.dense)
    for (int n : a.grid)
      if (n != 4)
        throw UsageError("--dense is limited to N = 4 (N^6 <= 20000)");

  Report rep("spectrum");
  rep.config() = a.echo();
  rep.config()["t"] = ts;
  rep.config()["family"] = a.family;
  rep.config()["dense"] = a.dense;
  rep.config()["calibrate"] = a.calibrate;
  rep.config()["heat_tau"] = taus;

  std::ostringstream csv;
  if (a.calibrate) {
    auto t0 = std::chrono::steady_clock::now();
    run_calibration(a, rep, csv, opt);
    rep.phase("calibration", seconds_since(t0));
  } else {
    std::vector<SpectrumResult> results;
    std::vector<LabeledHeatTrace> traces;
    json rows = json::array();
    for (double t : ts)
      for (int n : a.grid) {
        auto t0 = std::chrono::steady_clock::now();
        Scheme scheme{family, t};
        if (a.dense) {
          DiscreteOperator op(scheme, n);
          SpectrumResult even = dense_parity_spectrum(op, Parity::even);
          SpectrumResult odd = dense_parity_spectrum(op, Parity::odd);
          SpectrumResult full = dense_full_spectrum(op);
          std::vector<double> merged = even.values;
          merged.insert(merged.end(), odd.values.begin(), odd.values.end());
          std::sort(merged.begin(), merged.end());
          double worst = 0;
          for (std::size_t i = 0; i < merged.size() && i < full.values.size(); ++i)
            worst = std::max(worst, std::abs(merged[i] - full.values[i]) / std::max(1.0, std::abs(full.values[i])));
          const bool ok = merged.size() == full.values.size() && worst <= 1e-10;
          rep.verdict("parity_split_N" + std::to_string(n) + "_t" + format_double(t),
                      "SpectrumResult: full spectrum multiset = even + odd", ok,
                      {{"even", even.values.size()}, {"odd", odd.values.size()}, {"full", full.values.size()},
                       {"max_relative_difference", worst}});
          rows.push_back(Report::json::array({spectrum_json(even)}));
          rows.push_back(Report::json::array({spectrum_json(odd)}));
          if (!taus.empty())
            traces.push_back({t, n, heat_trace(parity == Parity::odd ? odd : parity == Parity::full ? full : even, taus)});
          results.push_back(std::move(even));
          results.push_back(std::move(odd));
        } else {
          SpectrumResult r = orbifold_spectrum(scheme, n, a.eigs, parity, opt, route);
          rep.verdict("converged_N" + std::to_string(n) + "_t" + format_double(t),
                      "eigs_smallest: residual <= tol max(1, lambda) per pair", r.converged,
                      {{"max_residual", r.max_residual}});
          if (parity != Parity::odd)
            rep.verdict("ground_state_N" + std::to_string(n) + "_t" + format_double(t),
                        "lambda_0 = 0 within tolerance (constants)", !r.values.empty() && std::abs(r.values[0]) <= a.tol,
                        {{"lambda0", json_number(r.values.empty() ? NAN : r.values[0])}});
          rows.push_back(Report::json::array({spectrum_json(r)}));
          if (!taus.empty())
            traces.push_back({t, n, heat_trace(r, taus)});
          results.push_back(std::move(r));
        }
        rep.phase("N" + std::to_string(n) + "_t" + format_double(t), seconds_since(t0));
      }
    rep.table("runs", {"summary"}, rows);
    write_spectrum_csv(csv, results);
    if (!traces.empty()) {
      std::ostringstream h;
      write_heat_trace_csv(h, traces);
      if (a.heat_output.empty())
        throw UsageError("--heat-tau needs --heat-output");
      write_text(a.heat_output, h.str());
    }
  }
  if (a.format == "csv")
    emit_csv(csv.str(), a.output);
  else if (!a.output.empty())
    write_text(a.output, csv.str());
  emit_report(rep, a.report, a.format == "json");
  return rep.passed() ? 0 : 1;
}

// ---------------------------------------------------------------- compare

struct CompareArgs : SpectralArgs {
  std::vector<std::string> t{"0", "0.25"};
  bool control = false;
  std::vector<std::string> s{"0", "0.25"};
  std::vector<std::string> heat_tau;
};

struct FamilyStudy {
  std::vector<double> params;
  std::vector<std::vector<std::array<SpectrumResult, 2>>> pairs;  // per compared parameter, per grid
  std::vector<GapStudy> studies;
};

FamilyStudy study_family(MetricFamily family, const std::vector<double>& params, const CompareArgs& a,
                         const SolverOptions& opt, Report& rep)
{
  FamilyStudy fs;
  fs.params = params;
  std::vector<std::vector<SpectrumResult>> spectra(params.size());
  for (std::size_t j = 0; j < params.size(); ++j)
    for (int n : a.grid) {
      auto t0 = std::chrono::steady_clock::now();
      spectra[j].push_back(orbifold_spectrum(Scheme{family, params[j]}, n, a.eigs, a.parity_kind(), opt, a.route_kind()));
      const SpectrumResult& r = spectra[j].back();
      rep.phase(to_string(family) + "_N" + std::to_string(n) + "_p" + format_double(params[j]), seconds_since(t0));
      rep.verdict("converged_" + to_string(family) + "_N" + std::to_string(n) + "_p" + format_double(params[j]),
                  "eigs_smallest: residual <= tol max(1, lambda) per pair", r.converged,
                  {{"max_residual", r.max_residual}}, family == MetricFamily::almost_inner);
    }
  for (std::size_t j = 1; j < params.size(); ++j) {
    std::vector<std::array<SpectrumResult, 2>> per_grid;
    for (std::size_t g = 0; g < a.grid.size(); ++g)
      per_grid.push_back({spectra[0][g], spectra[j][g]});
    fs.studies.push_back(gap_study(per_grid, a.tol));
    fs.pairs.push_back(std::move(per_grid));
  }
  return fs;
}

json study_json(const GapStudy& s)
{
  json steps = json::array();
  for (const auto& st : s.steps) {
    json ratios = json::array();
    for (double r : st.ratio)
      ratios.push_back(json_number(r));
    steps.push_back({{"coarse", st.coarse},
                     {"fine", st.fine},
                     {"ratios", ratios},
                     {"median_ratio", json_number(st.median_ratio)},
                     {"ratios_used", st.ratios_used},
                     {"failing_indices", st.failing}});
  }
  json grids = json::array();
  for (const auto& g : s.grids)
    grids.push_back({{"N", g.n}, {"max_gap", g.max_gap}, {"gaps", g.gaps}});
  return {{"noise_floor", s.floor},       {"median_limit", s.median_limit},
          {"per_index_pass", s.per_index_pass}, {"median_pass", s.median_pass},
          {"ground_state_pass", s.ground_state_pass}, {"grids", grids},
          {"steps", steps}};
}

int run_compare(const CompareArgs& a)
{
  check_grids(a.grid);
  if (a.t.size() < 2)
    throw UsageError("compare needs at least two --t values");
  if (a.grid.size() < 2)
    throw UsageError("compare needs at least two --grid values");
  for (std::size_t i = 1; i < a.grid.size(); ++i)
    if (a.grid[i] <= a.grid[i - 1])
      throw UsageError("--grid values must increase");
  if (a.control && a.s.size() < 2)
    throw UsageError("--control needs at least two --s values");
  std::unique_ptr<OperatorCache> cache;
  SolverOptions opt = a.solver(cache);
  const Parity parity = a.parity_kind();
  const std::vector<double> ts = parse_params(a.t);
  const std::vector<double> taus = parse_params(a.heat_tau);

  Report rep("compare");
  rep.config() = a.echo();
  rep.config()["t"] = ts;
  rep.config()["control"] = a.control;
  rep.config()["s"] = a.control ? json(parse_params(a.s)) : json::array();
  rep.config()["heat_tau"] = taus;

  std::ostringstream csv;
  std::ostringstream text;
  FamilyStudy main = study_family(MetricFamily::almost_inner, ts, a, opt, rep);
  for (std::size_t j = 0; j < main.studies.size(); ++j) {
    const GapStudy& st = main.studies[j];
    std::vector<GridGaps> grids = st.grids;
    write_gap_csv(csv, ts[0], ts[j + 1], parity, grids);
    const std::string tag = format_double(ts[0]) + "_vs_" + format_double(ts[j + 1]);
    rep.verdict("gaps_shrink_" + tag,
                "orbifold_spectrum: per-eigenvalue relative gap strictly smaller on the finer grid", st.per_index_pass,
                study_json(st));
    rep.verdict("median_shrink_" + tag, "orbifold_spectrum: median gap ratio under refinement <= 0.5", st.median_pass,
                study_json(st));
    rep.verdict("ground_state_" + tag, "lambda_0 = 0 within tolerance in every run", st.ground_state_pass);
    for (const auto& step : st.steps) {
      text << "t=" << format_double(ts[0]) << " vs " << format_double(ts[j + 1]) << ", N " << step.coarse << " -> "
           << step.fine << ": median ratio " << step.median_ratio << " over " << step.ratios_used
           << " gaps; failing indices:";
      for (long i : step.failing)
        text << ' ' << i;
      text << (step.failing.empty() ? " none" : "") << '\n';
    }
  }

  if (!taus.empty()) {
    // Heat traces of the complete even N = 4 spectra, compared within the band
    // extrapolated from the first refinement step above.
    HeatBand band = calibrate_heat_band(main.studies[0], 4);
    SpectrumResult a0 = dense_parity_spectrum(DiscreteOperator(Scheme{MetricFamily::almost_inner, ts[0]}, 4), parity);
    SpectrumResult a1 = dense_parity_spectrum(DiscreteOperator(Scheme{MetricFamily::almost_inner, ts[1]}, 4), parity);
    HeatTrace h0 = heat_trace(a0, taus), h1 = heat_trace(a1, taus);
    json rows = json::array();
    bool ok = true;
    for (std::size_t i = 0; i < taus.size(); ++i) {
      const double diff = std::abs(h0.trace[i] - h1.trace[i]);
      const double b = band.bound(a0.values, taus[i]);
      ok = ok && diff <= b;
      rows.push_back({taus[i], h0.trace[i], h1.trace[i], diff, b});
    }
    rep.table("heat_traces_N4", {"tau", "trace_a", "trace_b", "difference", "band"}, rows);
    rep.verdict("heat_trace_band", "heat traces agree within the refinement-calibrated band", ok,
                {{"eps_coarse", band.eps_coarse}, {"eps_fine", band.eps_fine}, {"order", band.order},
                 {"eps_target", band.eps_target}, {"target_N", band.target}});
  }

  if (a.control) {
    const std::vector<double> ss = parse_params(a.s);
    FamilyStudy ctl = study_family(MetricFamily::control, ss, a, opt, rep);
    for (std::size_t j = 0; j < ctl.studies.size(); ++j) {
      const GapStudy& st = ctl.studies[j];
      rep.verdict("control_gaps_s" + format_double(ss[0]) + "_vs_" + format_double(ss[j + 1]),
                  "control_deformation_spectrum: gaps reported, not gated", st.per_index_pass, study_json(st), false);
      text << "control s=" << format_double(ss[0]) << " vs " << format_double(ss[j + 1]) << ": max gap";
      for (const auto& g : st.grids)
        text << " N" << g.n << '=' << g.max_gap;
      text << " (diagnostic)\n";
    }
  }

  text << (rep.passed() ? "PASS" : "FAIL") << '\n';
  if (a.format == "csv") {
    emit_csv(csv.str(), a.output);
    std::cerr << text.str();
  } else if (!a.output.empty()) {
    write_text(a.output, csv.str());
  }
  emit_report(rep, a.report, a.format == "json");
  return rep.passed() ? 0 : 1;
}

void add_spectral_options(CLI::App* c, SpectralArgs& s)
{
  c->add_option("--grid", s.grid, "grid sizes N (even, >= 4)")->delimiter(',')->required();
  c->add_option("--eigs", s.eigs, "number of smallest eigenvalues")->capture_default_str();
  c->add_option("--parity", s.parity, "even | odd | full")->capture_default_str();
  c->add_option("--seed", s.seed, "eigensolver seed")->capture_default_str();
  c->add_option("--tol", s.tol, "relative residual tolerance")->capture_default_str();
  c->add_option("--max-iter", s.max_iter, "iteration cap per block")->capture_default_str();
  c->add_option("--route", s.route, "pieces | z-blocks")->capture_default_str();
  c->add_option("--precond", s.precond, "jacobi | shifted-ldlt")->capture_default_str();
  c->add_option("--cache", s.cache, "directory for cached assembled operators");
  c->add_option("--output", s.output, "CSV output path (default stdout)");
  c->add_option("--report", s.report, "JSON report path");
  c->add_option("--format", s.format, "csv | json (stdout format)")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"orbispec: almost-inner deformations of a six-dimensional nilmanifold orbifold"};
  app.require_subcommand(1);

  AlgebraArgs alg;
  auto* va = app.add_subcommand("verify-algebra", "exact group, witness, commutation and invariance suites");
  va->add_option("--t", alg.t, "deformation parameter, p/q or decimal (exact)")->capture_default_str();
  va->add_option("--trials", alg.trials, "random trials per randomized suite")->capture_default_str();
  va->add_option("--seed", alg.seed, "sampler seed")->capture_default_str();
  va->add_option("--bound", alg.bound, "lattice box [-bound, bound]^6")->capture_default_str();
  va->add_option("--format", alg.format, "text | json")->check(CLI::IsMember({"text", "json"}))->capture_default_str();
  va->add_option("--report", alg.report, "JSON report path");

  SingularArgs sing;
  auto* ss = app.add_subcommand("singular-set", "fixed planes of alpha Gamma and the beta diagnostics");
  ss->add_option("--bound", sing.bound, "translation box [-bound, bound]")->capture_default_str();
  ss->add_option("--format", sing.format, "text | json")->check(CLI::IsMember({"text", "json"}))->capture_default_str();
  ss->add_option("--report", sing.report, "JSON report path");

  SpectrumArgs spec;
  auto* sp = app.add_subcommand("spectrum", "smallest eigenvalues of the discrete Laplacian per (t, N)");
  add_spectral_options(sp, spec);
  sp->add_option("--t", spec.t, "deformation parameters (decimal or p/q)")->delimiter(',');
  sp->add_option("--family", spec.family, "almost-inner | control | flat")->capture_default_str();
  sp->add_flag("--dense", spec.dense, "complete even and odd spectra by dense diagonalization (N = 4)");
  sp->add_flag("--calibrate", spec.calibrate, "flat-mode calibration against the closed-form torus spectrum");
  sp->add_option("--heat-tau", spec.heat_tau, "tau values for heat traces")->delimiter(',');
  sp->add_option("--heat-output", spec.heat_output, "heat-trace CSV path");

  CompareArgs cmp;
  auto* cp = app.add_subcommand("compare", "gap study of orbifold spectra across t under grid refinement");
  add_spectral_options(cp, cmp);
  cp->add_option("--t", cmp.t, "parameters; the first is the reference")->delimiter(',');
  cp->add_flag("--control", cmp.control, "also run the non-almost-inner control family");
  cp->add_option("--s", cmp.s, "control parameters")->delimiter(',');
  cp->add_option("--heat-tau", cmp.heat_tau, "check dense N = 4 heat traces at these tau")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    apply_thread_env();
    if (*va)
      return run_verify_algebra(alg);
    if (*ss)
      return run_singular_set(sing);
    if (*sp)
      return run_spectrum(spec);
    if (*cp)
      return run_compare(cmp);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
