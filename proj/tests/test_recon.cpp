#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "nlsinv/recon.hpp"
#include "oracles.hpp"

using namespace nlsinv;
using recon::Status;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

RunConfig small_config() {
  RunConfig cfg;
  cfg.m = 2;
  cfg.k = 4.0;
  cfg.grid = {32, 64, 0.5};
  cfg.synthesis_grid = 21;
  cfg.threads = 2;
  return cfg;
}

}  // namespace

TEST(PlanFrequencies, CountForDefaultOrderAndWavenumber) {
  const auto plan = recon::plan_frequencies(4, 5.0);
  EXPECT_DOUBLE_EQ(plan.cutoff, 25.0);
  // n != 0 with n1^2 + n2^2 <= 15
  int brute = 0;
  for (int a = -4; a <= 4; ++a)
    for (int b = -4; b <= 4; ++b)
      if ((a || b) && a * a + b * b <= 15) ++brute;
  EXPECT_EQ(brute, 44);
  EXPECT_EQ(plan.entries.size(), 44u);
}

TEST(PlanFrequencies, EntriesAreSortedSymmetricAndWithinCutoff) {
  const auto plan = recon::plan_frequencies(3, 7.0);
  std::set<std::pair<int, int>> pts;
  double prev_r = 0.0, prev_a = -1.0;
  for (const auto& e : plan.entries) {
    const double r = norm(e.freq.xi);
    EXPECT_GT(r, 0.0);
    EXPECT_LE(r, plan.cutoff);
    EXPECT_EQ(e.weight, 1.0);
    EXPECT_DOUBLE_EQ(e.freq.xi[0], 2.0 * kPi * e.n1);
    EXPECT_DOUBLE_EQ(e.freq.xi[1], 2.0 * kPi * e.n2);
    double a = std::atan2(e.n2, e.n1);
    if (a < 0.0) a += 2.0 * kPi;
    if (std::abs(r - prev_r) < 1e-12) EXPECT_GT(a, prev_a);
    else EXPECT_GT(r, prev_r);
    prev_r = r;
    prev_a = a;
    pts.insert({e.n1, e.n2});
  }
  for (const auto& [a, b] : pts) EXPECT_TRUE(pts.count({-a, -b}));
}

TEST(PlanFrequencies, OverrideAndEmptyPlan) {
  const auto plan = recon::plan_frequencies(4, 5.0, 2.0 * kPi, 7.0);
  EXPECT_DOUBLE_EQ(plan.cutoff, 7.0);
  EXPECT_EQ(plan.entries.size(), 4u);
  EXPECT_DOUBLE_EQ(recon::plan_frequencies(4, 5.0, 2.0 * kPi, 100.0).cutoff, 25.0);
  EXPECT_THROW(recon::plan_frequencies(2, 1.0), ParameterError);
  EXPECT_THROW(recon::plan_frequencies(2, 2.0), ParameterError);
  EXPECT_THROW(recon::plan_frequencies(4, 5.0, 2.0 * kPi, 1.0), ParameterError);
}

TEST(AnalyticCoefficients, GaussianReference) {
  const auto spec = PotentialSpec::default_gaussian();
  const auto t = recon::analytic_coefficients(recon::plan_frequencies(4, 5.0), spec);
  for (const auto& c : t.entries) {
    cdouble ref = 0.0;
    for (const auto& g : spec.components)
      ref += 2.0 * kPi * g.scale * g.scale * g.amplitude *
             std::exp(cdouble(0.0, dot(c.xi, g.center))) *
             std::exp(-0.5 * g.scale * g.scale * dot(c.xi, c.xi));
    EXPECT_NEAR(std::abs(c.value - ref), 0.0, 1e-15);
    ASSERT_TRUE(c.reference.has_value());
    EXPECT_EQ(*c.reference, c.value);
  }
}

TEST(Synthesize, EmptyTableGivesZero) {
  const auto g = recon::synthesize({}, 11);
  EXPECT_EQ(g.values.size(), 121u);
  for (double v : g.values) EXPECT_EQ(v, 0.0);
  EXPECT_DOUBLE_EQ(g.coord(0), -0.5);
  EXPECT_DOUBLE_EQ(g.coord(10), 0.5);
  EXPECT_DOUBLE_EQ(g.coord(5), 0.0);
}

TEST(Synthesize, ConjugateSymmetricInputIsReal) {
  const auto spec = PotentialSpec::default_gaussian();
  const auto t = recon::analytic_coefficients(recon::plan_frequencies(4, 10.0), spec);
  const auto g = recon::synthesize(t, 40);
  double amp = 0.0;
  for (double v : g.values) amp = std::max(amp, std::abs(v));
  EXPECT_LE(g.imag_residue, 1e-12 * amp);
}

TEST(Synthesize, TruncationErrorMatchesIndependentOracle) {
  const auto spec = PotentialSpec::default_gaussian();
  double prev = 1e9;
  for (double k : {5.0, 10.0, 15.0}) {
    const auto plan = recon::plan_frequencies(4, k);
    const auto g = recon::synthesize(recon::analytic_coefficients(plan, spec), 45);
    const double err = recon::error_metrics(g, spec, 0.5).max_abs_error;
    EXPECT_NEAR(err, oracle::truncation_error(plan, spec, 45, 0.5), 1e-10) << "k=" << k;
    EXPECT_LT(err, prev);
    prev = err;
  }
}

TEST(ErrorMetrics, RestrictedToDisk) {
  recon::SynthesisGrid g;
  g.n = 3;
  g.values = {5.0, 0.0, 5.0, 0.0, 0.25, 0.0, 5.0, 0.0, 5.0};
  const auto m = recon::error_metrics(g, PotentialSpec::zero(), 0.5);
  EXPECT_DOUBLE_EQ(m.max_abs_error, 0.25);
  EXPECT_DOUBLE_EQ(m.l2_error, std::sqrt(0.25 * 0.25 * 0.25));
}

TEST(FourierCoefficient, ZeroPotentialAndIncompleteSet) {
  const PolarGrid grid(24, 48, 0.5);
  const HelmholtzSolver solver(grid, 4.0);
  const auto z = waves::make_zeta(2, 4.0, waves::Frequency::from_xi({2.0 * kPi, 0.0}));
  auto ms = measure::measure_all(solver, PolarField(grid), z, {});
  EXPECT_EQ(recon::fourier_coefficient(ms, recon::phi_trace(z, grid)), cdouble(0.0));
  ms.per_subset.pop_back();
  EXPECT_THROW(recon::fourier_coefficient(ms, recon::phi_trace(z, grid)), ParameterError);
}

TEST(FourierCoefficient, BoundaryCombinationConvergesToVolumeOracle) {
  const auto spec = PotentialSpec::default_gaussian();
  const auto z = waves::make_zeta(2, 5.0, waves::Frequency::from_xi({2.0 * kPi, -2.0 * kPi}));
  measure::MeasureOptions opt;
  opt.mode = measure::Mode::ExactLinearized;
  std::vector<double> rel;
  for (int nr : {32, 64, 128}) {
    const PolarGrid grid(nr, 2 * nr, 0.5);
    const HelmholtzSolver solver(grid, 5.0);
    const PolarField c = sample_potential(spec, grid);
    const cdouble b = recon::fourier_coefficient(measure::measure_all(solver, c, z, opt),
                                                 recon::phi_trace(z, grid));
    const cdouble v = recon::volume_oracle(c, z);
    rel.push_back(std::abs(b - v) / std::abs(v));
    // volume side against the closed form
    EXPECT_LE(std::abs(v - spec.fourier(z.freq.xi)) / std::abs(v), 5e-3) << nr;
  }
  EXPECT_LT(rel[2], 2e-3);
  EXPECT_GE(rel[0] / rel[1], 3.0);
  EXPECT_GE(rel[1] / rel[2], 3.0);
}

TEST(Run, NullPotentialReconstructsZero) {
  RunConfig cfg = small_config();
  cfg.potential = PotentialSpec::zero();
  const auto res = recon::run(cfg);
  EXPECT_EQ(res.coefficients.entries.size(), res.plan.entries.size());
  EXPECT_LE(res.metrics.max_abs_error, 1e-6);
  EXPECT_FALSE(res.metrics.partial);
}

TEST(Run, GaussianCoefficientsAreAccurateAndConjugateSymmetric) {
  RunConfig cfg = small_config();
  const auto res = recon::run(cfg);
  EXPECT_EQ(res.metrics.missing_count, 0u);
  const auto& e = res.coefficients.entries;
  double worst = 0.0;
  for (const auto& c : e) {
    ASSERT_TRUE(c.reference.has_value());
    worst = std::max(worst, std::abs(c.value - *c.reference) / std::abs(*c.reference));
  }
  EXPECT_LT(worst, 0.05);
  double combo = 0.0;
  for (std::size_t a = 0; a < e.size(); ++a)
    for (std::size_t b = 0; b < e.size(); ++b)
      if (e[a].n1 == -e[b].n1 && e[a].n2 == -e[b].n2)
        combo = std::max(combo, std::abs(e[a].value - std::conj(e[b].value)));
  double scale = 0.0;
  for (const auto& c : e) scale = std::max(scale, std::abs(c.value));
  EXPECT_LE(combo, 1e-2 * scale);
  EXPECT_LE(res.c_inv.imag_residue, 1e-2 * scale);
}

TEST(Run, DeterministicAcrossThreadCounts) {
  RunConfig a = small_config();
  a.threads = 1;
  RunConfig b = small_config();
  b.threads = 3;
  const auto ra = recon::run(a);
  const auto rb = recon::run(b);
  ASSERT_EQ(ra.coefficients.entries.size(), rb.coefficients.entries.size());
  for (std::size_t i = 0; i < ra.coefficients.entries.size(); ++i)
    EXPECT_EQ(ra.coefficients.entries[i].value, rb.coefficients.entries[i].value);
  EXPECT_EQ(ra.c_inv.values, rb.c_inv.values);

  namespace fs = std::filesystem;
  const fs::path da = fs::temp_directory_path() / "nlsinv_recon_a";
  const fs::path db = fs::temp_directory_path() / "nlsinv_recon_b";
  recon::write_result(ra, da.string());
  recon::write_result(rb, db.string());
  EXPECT_EQ(slurp(da / "coefficients.csv"), slurp(db / "coefficients.csv"));
  EXPECT_EQ(slurp(da / "c_inv.csv"), slurp(db / "c_inv.csv"));
  EXPECT_EQ(slurp(da / "coefficients.csv").substr(0, 41),
            "n1,n2,xi1,xi2,re,im,ref_re,ref_im,status\n");
  EXPECT_TRUE(fs::exists(da / "metrics.json"));
  EXPECT_EQ(parse_run_config(slurp(da / "config_echo.json")), a);
  fs::remove_all(da);
  fs::remove_all(db);
}

TEST(Run, SolverFailureMarksFrequenciesMissing) {
  RunConfig cfg = small_config();
  cfg.solver.max_fixed_point_iters = 1;
  const auto res = recon::run(cfg);
  EXPECT_TRUE(res.metrics.partial);
  EXPECT_EQ(res.metrics.missing_count, res.plan.entries.size());
  for (const auto& c : res.coefficients.entries) {
    EXPECT_EQ(c.status, Status::Missing);
    EXPECT_FALSE(c.message.empty());
  }
}

TEST(Run, ResonantWavenumberThrows) {
  RunConfig cfg = small_config();
  cfg.grid = {8, 16, 0.5};
  cfg.k = std::sqrt(dirichlet_eigenvalues(PolarGrid(8, 16, 0.5)).front());
  try {
    recon::run(cfg);
    FAIL() << "expected SolverError";
  } catch (const SolverError& e) {
    EXPECT_TRUE(e.report().condition_warning);
  }
}
