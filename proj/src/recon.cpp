#include "nlsinv/recon.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "json.hpp"

namespace nlsinv::recon {

FrequencyPlan plan_frequencies(int m, double k, double lattice_step,
                               std::optional<double> cutoff_override) {
  NLSINV_REQUIRE(m >= 1, "plan_frequencies: m must be >= 1");
  NLSINV_REQUIRE(k > 1.0, "plan_frequencies: k must be > 1");
  NLSINV_REQUIRE(lattice_step > 0.0, "plan_frequencies: lattice_step must be > 0");
  FrequencyPlan plan;
  plan.lattice_step = lattice_step;
  plan.cutoff = (m + 1) * k;
  if (cutoff_override) {
    NLSINV_REQUIRE(*cutoff_override > 0.0, "plan_frequencies: cutoff_override must be > 0");
    plan.cutoff = std::min(plan.cutoff, *cutoff_override);
  }
  const int nmax = static_cast<int>(std::floor(plan.cutoff / lattice_step));
  struct Keyed {
    long r2;
    double angle;
    PlanEntry e;
  };
  std::vector<Keyed> pts;
  for (int n1 = -nmax; n1 <= nmax; ++n1) {
    for (int n2 = -nmax; n2 <= nmax; ++n2) {
      if (n1 == 0 && n2 == 0) continue;
      const Vec2 xi{lattice_step * n1, lattice_step * n2};
      if (norm(xi) > plan.cutoff) continue;
      double angle = std::atan2(static_cast<double>(n2), static_cast<double>(n1));
      if (angle < 0.0) angle += 2.0 * kPi;
      pts.push_back({static_cast<long>(n1) * n1 + static_cast<long>(n2) * n2, angle,
                     {n1, n2, waves::Frequency::from_xi(xi), 1.0}});
    }
  }
  if (pts.empty())
    throw ParameterError("plan_frequencies: no lattice frequency within cutoff " +
                         format_double(plan.cutoff) + "; increase k (or m)");
  std::sort(pts.begin(), pts.end(), [](const Keyed& a, const Keyed& b) {
    return a.r2 != b.r2 ? a.r2 < b.r2 : a.angle < b.angle;
  });
  plan.entries.reserve(pts.size());
  for (auto& p : pts) plan.entries.push_back(p.e);
  return plan;
}

cdouble fourier_coefficient(const measure::MeasurementSet& mset, const BoundaryTrace& phi) {
  const pie::PieExpansion pe = pie::expand(mset.m);
  NLSINV_REQUIRE(mset.per_subset.size() == pe.terms.size(),
                 "fourier_coefficient: measurement set is incomplete");
  cdouble acc = 0.0;
  for (std::size_t t = 0; t < pe.terms.size(); ++t) {
    const auto& sm = mset.per_subset[t];
    NLSINV_REQUIRE(sm.subset.mask == pe.terms[t].mask, "fourier_coefficient: subset order mismatch");
    const cdouble integral = boundary_integral(sm.lin_neumann, phi);
    acc += pe.terms[t].sign > 0 ? integral : -integral;
  }
  return acc * pe.normalizer();
}

BoundaryTrace phi_trace(const waves::ZetaSet& zeta, const PolarGrid& grid) {
  return BoundaryTrace::from_function(grid,
                                      [&](const Vec2& x) { return waves::ce_value(zeta.zeta0, x); });
}

cdouble volume_oracle(const PolarField& c, const waves::ZetaSet& zeta) {
  PolarField integrand = PolarField::from_function(c.grid(), [&](const Vec2& x) {
    cdouble p = waves::ce_value(zeta.zeta0, x);
    for (int j = 1; j <= zeta.m; ++j) p *= waves::ce_value(zeta.zeta(j), x);
    return p;
  });
  return volume_integral(c, integrand);
}

std::string to_string(Status s) { return s == Status::Ok ? "ok" : "missing"; }

std::size_t CoefficientTable::missing_count() const {
  return static_cast<std::size_t>(std::count_if(
      entries.begin(), entries.end(), [](const Coefficient& c) { return c.status == Status::Missing; }));
}

CoefficientTable analytic_coefficients(const FrequencyPlan& plan, const PotentialSpec& spec) {
  CoefficientTable t;
  t.entries.reserve(plan.entries.size());
  for (const PlanEntry& e : plan.entries) {
    const cdouble f = spec.fourier(e.freq.xi);
    t.entries.push_back({e.n1, e.n2, e.freq.xi, e.weight, f, f, Status::Ok, {}});
  }
  return t;
}

SynthesisGrid synthesize(const CoefficientTable& coeffs, int n) {
  NLSINV_REQUIRE(n >= 1, "synthesize: grid size must be >= 1");
  SynthesisGrid g;
  g.n = n;
  std::vector<cdouble> acc(static_cast<std::size_t>(n) * n, 0.0);
  const cdouble i(0.0, 1.0);
  for (const Coefficient& c : coeffs.entries) {
    if (c.status != Status::Ok) continue;
    const cdouble a = c.value * c.weight;
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q)
        acc[static_cast<std::size_t>(p) * n + q] +=
            a * std::exp(-i * (c.xi[0] * g.coord(p) + c.xi[1] * g.coord(q)));
  }
  g.values.resize(acc.size());
  for (std::size_t s = 0; s < acc.size(); ++s) {
    g.values[s] = acc[s].real();
    g.imag_residue = std::max(g.imag_residue, std::abs(acc[s].imag()));
  }
  return g;
}

Metrics error_metrics(const SynthesisGrid& c_inv, const PotentialSpec& spec, double radius) {
  Metrics m;
  const double h = c_inv.n > 1 ? 1.0 / (c_inv.n - 1) : 1.0;
  double sq = 0.0;
  for (int a = 0; a < c_inv.n; ++a) {
    for (int b = 0; b < c_inv.n; ++b) {
      const Vec2 x{c_inv.coord(a), c_inv.coord(b)};
      if (dot(x, x) > radius * radius) continue;
      const double e = std::abs(c_inv(a, b) - spec(x));
      m.max_abs_error = std::max(m.max_abs_error, e);
      sq += e * e;
    }
  }
  m.l2_error = std::sqrt(sq * h * h);
  return m;
}

// ---------------------------------------------------------------------------

ReconstructionResult run(const RunConfig& cfg, const Progress& progress) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  ReconstructionResult res;
  res.config = cfg;
  res.plan = plan_frequencies(cfg.m, cfg.k, cfg.lattice_step, cfg.cutoff_override);

  const PolarGrid grid(cfg.grid.nr, cfg.grid.ntheta, cfg.grid.radius);
  const PolarField c = sample_potential(cfg.potential, grid);
  const HelmholtzSolver solver(grid, cfg.k, cfg.solver.resonance_tol);
  if (solver.near_resonance()) {
    SolveReport rep;
    rep.condition_warning = true;
    rep.message = "k^2 is numerically a discrete Dirichlet eigenvalue (relative gap " +
                  format_double(solver.resonance_gap()) + ")";
    throw SolverError("reconstruct: " + rep.message, rep);
  }

  measure::MeasureOptions opt;
  opt.beta = cfg.beta;
  opt.mode = cfg.mode;
  opt.solver = cfg.solver;
  opt.noise_level = cfg.noise_level;
  opt.seed = cfg.seed;

  const std::size_t total = res.plan.entries.size();
  res.coefficients.entries.resize(total);
  std::atomic<std::size_t> next{0};
  std::size_t done = 0;
  std::mutex mu;
  std::exception_ptr fatal;

  auto worker = [&] {
    for (std::size_t idx = next++; idx < total; idx = next++) {
      const PlanEntry& e = res.plan.entries[idx];
      Coefficient coef{e.n1, e.n2, e.freq.xi, e.weight, {}, cfg.potential.fourier(e.freq.xi),
                       Status::Ok, {}};
      try {
        const waves::ZetaSet zeta = waves::make_zeta(cfg.m, cfg.k, e.freq);
        const measure::MeasurementSet mset = measure::measure_all(solver, c, zeta, opt);
        coef.value = fourier_coefficient(mset, phi_trace(zeta, grid));
      } catch (const SolverError& err) {
        coef.status = Status::Missing;
        coef.message = err.what();
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!fatal) fatal = std::current_exception();
        next = total;
      }
      res.coefficients.entries[idx] = std::move(coef);
      std::lock_guard<std::mutex> lock(mu);
      ++done;
      if (progress) progress(done, total);
    }
  };

  unsigned nthreads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                      : std::max(1u, std::thread::hardware_concurrency());
  nthreads = static_cast<unsigned>(std::min<std::size_t>(nthreads, total));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (fatal) std::rethrow_exception(fatal);

  res.c_inv = synthesize(res.coefficients, cfg.synthesis_grid);
  res.metrics = error_metrics(res.c_inv, cfg.potential, cfg.grid.radius);
  res.metrics.missing_count = res.coefficients.missing_count();
  res.metrics.partial = res.metrics.missing_count > 0;
  res.metrics.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

// ---------------------------------------------------------------------------

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw FormatError("cannot open '" + path + "' for writing");
  return os;
}

}  // namespace

void write_coefficients_csv(const CoefficientTable& t, const std::string& path) {
  auto os = open_out(path);
  os << "n1,n2,xi1,xi2,re,im,ref_re,ref_im,status\n";
  for (const Coefficient& c : t.entries) {
    os << c.n1 << ',' << c.n2 << ',' << format_double(c.xi[0]) << ',' << format_double(c.xi[1])
       << ',';
    if (c.status == Status::Ok)
      os << format_double(c.value.real()) << ',' << format_double(c.value.imag());
    else
      os << ',';
    os << ',';
    if (c.reference)
      os << format_double(c.reference->real()) << ',' << format_double(c.reference->imag());
    else
      os << ',';
    os << ',' << to_string(c.status) << '\n';
  }
}

void write_synthesis_csv(const SynthesisGrid& g, const PotentialSpec& truth,
                         const std::string& path) {
  auto os = open_out(path);
  os << "i,j,x1,x2,c_inv,c_true\n";
  for (int a = 0; a < g.n; ++a)
    for (int b = 0; b < g.n; ++b)
      os << a + 1 << ',' << b + 1 << ',' << format_double(g.coord(a)) << ','
         << format_double(g.coord(b)) << ',' << format_double(g(a, b)) << ','
         << format_double(truth({g.coord(a), g.coord(b)})) << '\n';
}

std::string metrics_json(const Metrics& m) {
  nlohmann::json j = {{"max_abs_error", m.max_abs_error}, {"l2_error", m.l2_error},
                      {"wall_seconds", m.wall_seconds},   {"missing_count", m.missing_count},
                      {"partial", m.partial}};
  return j.dump(2);
}

void write_result(const ReconstructionResult& res, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  write_coefficients_csv(res.coefficients, (fs::path(dir) / "coefficients.csv").string());
  write_synthesis_csv(res.c_inv, res.config.potential, (fs::path(dir) / "c_inv.csv").string());
  open_out((fs::path(dir) / "metrics.json").string()) << metrics_json(res.metrics) << '\n';
  open_out((fs::path(dir) / "config_echo.json").string()) << to_json(res.config) << '\n';
}

}  // namespace nlsinv::recon
