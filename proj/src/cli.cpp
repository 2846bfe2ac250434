#include "nlsinv/cli.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "nlsinv/config.hpp"
#include "nlsinv/measure.hpp"
#include "nlsinv/pie.hpp"
#include "nlsinv/recon.hpp"
#include "nlsinv/solver.hpp"
#include "nlsinv/waves.hpp"

namespace nlsinv::cli {

namespace fs = std::filesystem;

namespace {

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::string sci(double v) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(3) << v;
  return os.str();
}

const char* verdict(bool ok) { return ok ? "ok" : "FAIL"; }

// ---------------------------------------------------------------------------
// validate

struct PieArgs {
  std::vector<int> ms;
  int trials = 100;
  std::uint64_t seed = 1;
};

int validate_pie(const PieArgs& a, std::ostream& out) {
  std::vector<int> ms = a.ms;
  if (ms.empty())
    for (int m = 2; m <= 8; ++m) ms.push_back(m);
  std::mt19937_64 rng(a.seed);
  std::normal_distribution<double> normal;
  bool all_ok = true;
  out << "m  trials  product_residual  power_residual  exact_integer  status\n";
  for (int m : ms) {
    const pie::PieExpansion ex = pie::expand(m);
    double prod_res = 0.0, pow_res = 0.0;
    for (int t = 0; t < a.trials; ++t) {
      std::vector<cdouble> w(m);
      for (auto& z : w) z = {normal(rng), normal(rng)};
      double l1 = 0.0;
      cdouble prod = 1.0;
      for (const auto& z : w) {
        l1 += std::abs(z);
        prod *= z;
      }
      const cdouble p = pie::polarize<cdouble>(ex, w);
      prod_res = std::max(prod_res, std::abs(p - prod) / std::pow(l1, m));
      for (int l = 1; l < m; ++l)
        pow_res = std::max(pow_res,
                           std::abs(pie::polarize_power<cdouble>(ex, w, l)) / std::pow(l1, l));
    }
    std::vector<long long> wi(m);
    long long iprod = 1;
    for (int j = 0; j < m; ++j) {
      wi[j] = j + 1;
      iprod *= j + 1;
    }
    bool exact = pie::polarize<long long>(ex, wi) == iprod;
    for (int l = 1; l < m; ++l) exact = exact && pie::polarize_power<long long>(ex, wi, l) == 0;
    const bool ok = prod_res <= 1e-12 && pow_res <= 1e-12 && exact;
    all_ok = all_ok && ok;
    out << m << "  " << a.trials << "  " << sci(prod_res) << "  " << sci(pow_res) << "  "
        << (exact ? "yes" : "no") << "  " << verdict(ok) << '\n';
  }
  return all_ok ? kOk : kValidation;
}

struct ZetaArgs {
  std::optional<int> m;
  std::optional<double> k;
  std::optional<double> ratio;
};

int validate_zeta(const ZetaArgs& a, std::ostream& out) {
  std::vector<int> ms = a.m ? std::vector<int>{*a.m} : std::vector<int>{2, 3, 4, 5, 6};
  std::vector<double> ks = a.k ? std::vector<double>{*a.k} : std::vector<double>{1.5, 5, 15};
  std::vector<double> ratios =
      a.ratio ? std::vector<double>{*a.ratio} : std::vector<double>{0.1, 0.5, 1.0, 1.5, 3.0};
  const double angles[] = {0.0, 0.7, 2.3, 4.0};
  bool all_ok = true;
  out << "m  k  ratio  regime  dot_residual  sum_residual  status\n";
  for (int m : ms)
    for (double k : ks)
      for (double ratio : ratios) {
        double dres = 0.0, sres = 0.0;
        waves::Regime regime = waves::Regime::Propagating;
        for (double ang : angles) {
          const double kappa = ratio * (m + 1) * k;
          const auto z = waves::make_zeta(
              m, k, waves::Frequency::from_xi({kappa * std::cos(ang), kappa * std::sin(ang)}));
          const auto r = waves::residuals(z);
          dres = std::max(dres, r.dot_residual);
          sres = std::max(sres, r.sum_residual);
          regime = z.regime;
        }
        const bool ok = dres <= 1e-12 && sres <= 1e-12;
        all_ok = all_ok && ok;
        out << m << "  " << k << "  " << ratio << "  "
            << (regime == waves::Regime::Propagating ? "propagating" : "evanescent") << "  "
            << sci(dres) << "  " << sci(sres) << "  " << verdict(ok) << '\n';
      }
  return all_ok ? kOk : kValidation;
}

struct IdentityArgs {
  std::vector<int> ms;
  double k = 10.0;
  int nr = 128;
  int ntheta = 256;
  double tol = 1e-3;
};

int validate_identity(const IdentityArgs& a, std::ostream& out) {
  std::vector<int> ms = a.ms.empty() ? std::vector<int>{2, 3, 4} : a.ms;
  const PolarGrid grid(a.nr, a.ntheta);
  const PolarField c = sample_potential(PotentialSpec::default_gaussian(), grid);
  const HelmholtzSolver solver(grid, a.k);
  measure::MeasureOptions opt;
  opt.mode = measure::Mode::ExactLinearized;
  bool all_ok = true;
  out << "m  n1  n2  |boundary - volume| / |volume|  status\n";
  for (int m : ms) {
    const auto plan = recon::plan_frequencies(m, a.k);
    const std::size_t n = plan.entries.size();
    for (std::size_t idx : {std::size_t{0}, n / 3, (2 * n) / 3}) {
      const auto& e = plan.entries[idx];
      const auto zeta = waves::make_zeta(m, a.k, e.freq);
      const auto mset = measure::measure_all(solver, c, zeta, opt);
      const cdouble b = recon::fourier_coefficient(mset, recon::phi_trace(zeta, grid));
      const cdouble v = recon::volume_oracle(c, zeta);
      const double rel = std::abs(b - v) / std::abs(v);
      const bool ok = rel <= a.tol;
      all_ok = all_ok && ok;
      out << m << "  " << e.n1 << "  " << e.n2 << "  " << sci(rel) << "  " << verdict(ok) << '\n';
    }
  }
  return all_ok ? kOk : kValidation;
}

struct LinearizationArgs {
  std::vector<int> ms;
  double k = 5.0;
  int nr = 64;
  int ntheta = 128;
};

int validate_linearization(const LinearizationArgs& a, std::ostream& out) {
  std::vector<int> ms = a.ms.empty() ? std::vector<int>{2, 3} : a.ms;
  const PolarGrid grid(a.nr, a.ntheta);
  const PolarField c = sample_potential(PotentialSpec::default_gaussian(), grid);
  const HelmholtzSolver solver(grid, a.k);
  const std::vector<double> gammas{0.4, 0.2, 0.1, 0.05};
  const std::vector<double> betas{1e-1, 3e-2, 1e-2, 3e-3};
  bool all_ok = true;
  out << "m  sweep  errors  slope  expected  status\n";
  for (int m : ms) {
    const auto zeta = waves::make_zeta(m, a.k, waves::Frequency::from_xi({2 * kPi, 0.0}));
    const auto ex = measure::excitations(zeta, grid);
    const BoundaryTrace f = ex.front().trace;

    const auto gerr = measure::linearization_error_probe(solver, c, f, m, gammas);
    const double gs = loglog_slope(gammas, gerr);
    const bool gok = std::abs(gs - 2.0) <= 0.15;

    const BoundaryTrace lin = measure::linearized_neumann(solver, c, f, m);
    std::vector<double> berr;
    for (double b : betas) {
      BoundaryTrace d = measure::nonlinear_neumann_difference(solver, c, f, m, b);
      d -= lin;
      berr.push_back(d.l2_norm());
    }
    const double bs = loglog_slope(betas, berr);
    const bool bok = std::abs(bs - (m - 1)) <= 0.3;
    all_ok = all_ok && gok && bok;

    auto list = [](const std::vector<double>& v) {
      std::string s;
      for (double x : v) s += (s.empty() ? "" : ",") + sci(x);
      return s;
    };
    out << m << "  gamma  " << list(gerr) << "  " << sci(gs) << "  2  " << verdict(gok) << '\n';
    out << m << "  beta  " << list(berr) << "  " << sci(bs) << "  " << m - 1 << "  "
        << verdict(bok) << '\n';
  }
  return all_ok ? kOk : kValidation;
}

// ---------------------------------------------------------------------------
// run configuration from file + flags

struct ConfigFlags {
  std::string config_path;
  std::optional<int> m, nr, ntheta, synthesis_grid, threads;
  std::optional<double> k, beta, noise, cutoff;
  std::optional<std::string> potential, mode, method, out;
  std::optional<std::uint64_t> seed;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    app->add_option("--m", m, "Power of the nonlinearity");
    app->add_option("--k", k, "Wavenumber");
    app->add_option("--beta", beta, "Boundary data scale");
    app->add_option("--nr", nr, "Radial cells");
    app->add_option("--ntheta", ntheta, "Angular cells (even)");
    app->add_option("--synthesis-grid", synthesis_grid, "Cartesian synthesis points per axis");
    app->add_option("--potential", potential, "zero | gaussian | disks");
    app->add_option("--mode", mode, "nonlinear_difference | exact_linearized");
    app->add_option("--method", method, "fixed_point | newton");
    app->add_option("--noise", noise, "Relative noise level on Neumann data");
    app->add_option("--cutoff", cutoff, "Upper bound on |xi| below (m+1)k");
    app->add_option("--seed", seed, "Noise seed");
    app->add_option("--threads", threads, "Worker threads (0: all cores)");
    app->add_option("--out", out, "Output directory");
  }

  RunConfig resolve() const {
    RunConfig c = config_path.empty() ? RunConfig{} : load_run_config(config_path);
    if (m) c.m = *m;
    if (k) c.k = *k;
    if (beta) c.beta = *beta;
    if (nr) c.grid.nr = *nr;
    if (ntheta) c.grid.ntheta = *ntheta;
    if (synthesis_grid) c.synthesis_grid = *synthesis_grid;
    if (potential) {
      const PotentialKind kind = potential_kind_from_string(*potential);
      c.potential = kind == PotentialKind::GaussianSum ? PotentialSpec::default_gaussian()
                    : kind == PotentialKind::DiskPiecewiseConstant ? PotentialSpec::default_disks()
                                                                   : PotentialSpec::zero();
    }
    if (mode) c.mode = measure::mode_from_string(*mode);
    if (method) c.solver.method = nonlinear_method_from_string(*method);
    if (noise) c.noise_level = *noise;
    if (cutoff) c.cutoff_override = *cutoff;
    if (seed) c.seed = *seed;
    if (threads) c.threads = *threads;
    if (out) c.output_dir = *out;
    c.validate();
    return c;
  }
};

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream os(p);
  if (!os) throw FormatError("cannot open '" + p.string() + "' for writing");
  os << text << '\n';
}

std::string report_json(const SolveReport& r) {
  nlohmann::json j = {{"iterations", r.iterations},
                      {"final_residual", r.final_residual},
                      {"converged", r.converged},
                      {"condition_warning", r.condition_warning},
                      {"update_norms", r.update_norms},
                      {"message", r.message}};
  return j.dump(2);
}

struct ForwardArgs {
  std::vector<double> xi{2 * kPi, 0.0};
  std::optional<std::uint32_t> mask;
};

int cmd_forward(const RunConfig& cfg, const ForwardArgs& a, std::ostream& out, std::ostream& err) {
  const PolarGrid grid(cfg.grid.nr, cfg.grid.ntheta, cfg.grid.radius);
  const PolarField c = sample_potential(cfg.potential, grid);
  const auto zeta = waves::make_zeta(cfg.m, cfg.k, waves::Frequency::from_xi({a.xi[0], a.xi[1]}));
  const std::uint32_t full = (1u << cfg.m) - 1u;
  const std::uint32_t mask = a.mask.value_or(full);
  NLSINV_REQUIRE(mask >= 1 && mask <= full, "forward: --mask must select a non-empty subset");
  const auto ex = measure::excitations(zeta, grid);
  pie::SubsetTerm s{mask, std::popcount(mask), 1};
  const BoundaryTrace f = cfg.beta * measure::subset_dirichlet(ex, s);

  fs::create_directories(cfg.output_dir);
  const fs::path dir(cfg.output_dir);
  write_text(dir / "config_echo.json", to_json(cfg));
  try {
    const HelmholtzSolver solver(grid, cfg.k, cfg.solver.resonance_tol);
    NonlinearSolution sol = solve_nonlinear(solver, c, cfg.m, f, cfg.solver);
    write_csv((dir / "u.csv").string(), sol.u);
    write_csv((dir / "dirichlet.csv").string(), f);
    write_csv((dir / "neumann.csv").string(), neumann_trace(sol.u, f));
    write_text(dir / "report.json", report_json(sol.report));
    out << "forward: converged in " << sol.report.iterations << " iterations, update "
        << sci(sol.report.final_residual) << ", output in " << dir.string() << '\n';
    return kOk;
  } catch (const SolverError& e) {
    write_text(dir / "report.json", report_json(e.report()));
    if (e.report().condition_warning) err << "condition_warning: ";
    err << e.what() << '\n';
    return kSolver;
  }
}

int cmd_reconstruct(const RunConfig& cfg, std::ostream& out) {
  const auto res = recon::run(cfg);
  recon::write_result(res, cfg.output_dir);
  out << "reconstruct: " << res.plan.entries.size() << " frequencies, max_abs_error "
      << sci(res.metrics.max_abs_error) << ", l2_error " << sci(res.metrics.l2_error) << ", "
      << std::fixed << std::setprecision(1) << res.metrics.wall_seconds << " s\n";
  if (res.metrics.partial) {
    out << "reconstruct: partial result, " << res.metrics.missing_count << " missing\n";
    return kPartial;
  }
  return kOk;
}

struct SweepArgs {
  std::string axis;
  std::vector<double> values;
};

int cmd_sweep(const RunConfig& base, const SweepArgs& a, std::ostream& out) {
  NLSINV_REQUIRE(a.axis == "k" || a.axis == "m" || a.axis == "beta",
                 "sweep: --axis must be k, m or beta");
  NLSINV_REQUIRE(!a.values.empty(), "sweep: --values is empty");
  const fs::path root(base.output_dir);
  fs::create_directories(root);

  std::optional<recon::ReconstructionResult> reference;
  if (a.axis == "beta") {
    RunConfig rc = base;
    rc.mode = measure::Mode::ExactLinearized;
    reference = recon::run(rc);
  }

  std::ofstream csv(root / "sweep.csv");
  if (!csv) throw FormatError("cannot write sweep.csv");
  csv << a.axis << ",max_abs_error,l2_error,wall_seconds,missing_count,partial";
  if (reference) csv << ",coef_diff";
  csv << '\n';
  bool partial = false;
  for (double v : a.values) {
    RunConfig rc = base;
    if (a.axis == "k") rc.k = v;
    if (a.axis == "m") {
      NLSINV_REQUIRE(v == std::floor(v), "sweep: m values must be integers");
      rc.m = static_cast<int>(v);
    }
    if (a.axis == "beta") rc.beta = v;
    rc.output_dir = (root / (a.axis + "_" + format_double(v))).string();
    rc.validate();
    const auto res = recon::run(rc);
    recon::write_result(res, rc.output_dir);
    partial = partial || res.metrics.partial;
    csv << format_double(v) << ',' << format_double(res.metrics.max_abs_error) << ','
        << format_double(res.metrics.l2_error) << ',' << format_double(res.metrics.wall_seconds)
        << ',' << res.metrics.missing_count << ',' << (res.metrics.partial ? 1 : 0);
    if (reference) {
      double diff = 0.0;
      const auto& ref = reference->coefficients.entries;
      const auto& cur = res.coefficients.entries;
      for (std::size_t i = 0; i < cur.size(); ++i)
        if (cur[i].status == recon::Status::Ok && ref[i].status == recon::Status::Ok)
          diff = std::max(diff, std::abs(cur[i].value - ref[i].value));
      csv << ',' << format_double(diff);
    }
    csv << '\n';
    out << "sweep: " << a.axis << " = " << format_double(v) << ", max_abs_error "
        << sci(res.metrics.max_abs_error) << '\n';
  }
  return partial ? kPartial : kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Potential reconstruction for the nonlinear Schrodinger equation"};
  app.require_subcommand(1);

  auto* validate = app.add_subcommand("validate", "Check identities and convergence rates");
  validate->require_subcommand(1);

  PieArgs pie_args;
  auto* v_pie = validate->add_subcommand("pie", "Polarization identities");
  v_pie->add_option("--m", pie_args.ms, "Orders to check (default 2..8)");
  v_pie->add_option("--trials", pie_args.trials, "Random weight vectors per order");
  v_pie->add_option("--seed", pie_args.seed, "RNG seed");

  ZetaArgs zeta_args;
  auto* v_zeta = validate->add_subcommand("zeta", "Probe vector constraints");
  v_zeta->add_option("--m", zeta_args.m);
  v_zeta->add_option("--k", zeta_args.k);
  v_zeta->add_option("--ratio", zeta_args.ratio, "|xi| / ((m+1) k)");

  IdentityArgs id_args;
  auto* v_id = validate->add_subcommand("identity", "Boundary combination vs volume integral");
  v_id->add_option("--m", id_args.ms, "Orders (default 2 3 4)");
  v_id->add_option("--k", id_args.k);
  v_id->add_option("--nr", id_args.nr);
  v_id->add_option("--ntheta", id_args.ntheta);
  v_id->add_option("--tol", id_args.tol, "Relative tolerance");

  LinearizationArgs lin_args;
  auto* v_lin = validate->add_subcommand("linearization", "Linearization error rates");
  v_lin->add_option("--m", lin_args.ms, "Orders (default 2 3)");
  v_lin->add_option("--k", lin_args.k);
  v_lin->add_option("--nr", lin_args.nr);
  v_lin->add_option("--ntheta", lin_args.ntheta);

  ConfigFlags fwd_flags, rec_flags, sweep_flags;
  ForwardArgs fwd_args;
  auto* forward = app.add_subcommand("forward", "One nonlinear forward solve");
  fwd_flags.attach(forward);
  forward->add_option("--xi", fwd_args.xi, "Target frequency of the probes")->expected(2);
  forward->add_option("--mask", fwd_args.mask, "Subset bitmask of probes (default: all)");

  auto* reconstruct = app.add_subcommand("reconstruct", "Full reconstruction run");
  rec_flags.attach(reconstruct);

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "Repeated reconstructions along one parameter");
  sweep_flags.attach(sweep);
  sweep->add_option("--axis", sweep_args.axis, "k | m | beta")->required();
  sweep->add_option("--values", sweep_args.values, "Parameter values")->required();

  std::vector<const char*> argv{"nlsinv"};
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  }

  try {
    if (v_pie->parsed()) return validate_pie(pie_args, out);
    if (v_zeta->parsed()) return validate_zeta(zeta_args, out);
    if (v_id->parsed()) return validate_identity(id_args, out);
    if (v_lin->parsed()) return validate_linearization(lin_args, out);
    if (forward->parsed()) return cmd_forward(fwd_flags.resolve(), fwd_args, out, err);
    if (reconstruct->parsed()) return cmd_reconstruct(rec_flags.resolve(), out);
    if (sweep->parsed()) return cmd_sweep(sweep_flags.resolve(), sweep_args, out);
  } catch (const SolverError& e) {
    if (e.report().condition_warning) err << "condition_warning: ";
    err << "solver error: " << e.what() << '\n';
    return kSolver;
  } catch (const ParameterError& e) {
    err << "invalid parameter: " << e.what() << '\n';
    return kValidation;
  } catch (const FormatError& e) {
    err << "invalid input: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}

}  // namespace nlsinv::cli
