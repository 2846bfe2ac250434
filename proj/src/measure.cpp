#include "nlsinv/measure.hpp"

#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "json.hpp"

namespace nlsinv::measure {

std::string to_string(Mode mode) {
  return mode == Mode::ExactLinearized ? "exact_linearized" : "nonlinear_difference";
}

Mode mode_from_string(const std::string& s) {
  if (s == "nonlinear_difference") return Mode::NonlinearDifference;
  if (s == "exact_linearized") return Mode::ExactLinearized;
  throw ParameterError("unknown measurement mode '" + s + "'");
}

std::vector<Excitation> excitations(const waves::ZetaSet& zeta, const PolarGrid& grid) {
  std::vector<Excitation> out;
  out.reserve(zeta.m);
  for (int j = 1; j <= zeta.m; ++j) {
    const CVec2& z = zeta.zeta(j);
    auto ce = [&z](const Vec2& x) { return waves::ce_value(z, x); };
    out.push_back({PolarField::from_function(grid, ce), BoundaryTrace::from_function(grid, ce)});
  }
  return out;
}

BoundaryTrace subset_dirichlet(const std::vector<Excitation>& ex, const pie::SubsetTerm& s) {
  NLSINV_REQUIRE(!ex.empty(), "subset_dirichlet: no excitations");
  BoundaryTrace out(ex.front().trace.grid());
  for (int j = 1; j <= static_cast<int>(ex.size()); ++j)
    if (s.contains(j)) out += ex[j - 1].trace;
  return out;
}

BoundaryTrace linearized_neumann(const HelmholtzSolver& solver, const PolarField& c,
                                 const BoundaryTrace& f, int m, const SolverConfig& cfg) {
  const PolarGrid& g = solver.grid();
  PolarField u0 = solve_helmholtz(solver, PolarField(g), f, cfg).first;
  PolarField src(g);
  for (std::size_t n = 0; n < src.values().size(); ++n) {
    cdouble p = 1.0;
    for (int e = 0; e < m; ++e) p *= u0.values()[n];
    src.values()[n] = c.values()[n] * p;
  }
  const BoundaryTrace zero(g);
  PolarField u1 = solve_helmholtz(solver, src, zero, cfg).first;
  return neumann_trace(u1, zero);
}

BoundaryTrace nonlinear_neumann_difference(const HelmholtzSolver& solver, const PolarField& c,
                                           const BoundaryTrace& f, int m, double beta,
                                           const SolverConfig& cfg) {
  NLSINV_REQUIRE(beta > 0.0, "nonlinear_neumann_difference: beta must be > 0");
  NonlinearSolution sol = solve_nonlinear(solver, c, m, beta * f, cfg);
  BoundaryTrace d = neumann_trace(sol.scattered, BoundaryTrace(solver.grid()));
  d *= std::pow(beta, -m);
  return d;
}

namespace {

void add_noise(BoundaryTrace& t, double level, std::uint64_t seed, const Vec2& xi,
               std::uint32_t mask) {
  double ms = 0.0;
  for (const cdouble& z : t.values()) ms += std::norm(z);
  const double sigma = level * std::sqrt(ms / t.values().size() / 2.0);
  const auto a = std::bit_cast<std::uint64_t>(xi[0]);
  const auto b = std::bit_cast<std::uint64_t>(xi[1]);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32), mask};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, sigma);
  for (cdouble& z : t.values()) {
    const double re = normal(rng);
    const double im = normal(rng);
    z += cdouble(re, im);
  }
}

}  // namespace

SubsetMeasurement measure_subset(const HelmholtzSolver& solver, const PolarField& c,
                                 const std::vector<Excitation>& ex, const pie::SubsetTerm& s,
                                 int m, const MeasureOptions& opt) {
  NLSINV_REQUIRE(static_cast<int>(ex.size()) == m, "measure_subset: need m excitations");
  SubsetMeasurement out;
  out.subset = s;
  out.mode = opt.mode;
  out.dirichlet = subset_dirichlet(ex, s);
  out.lin_neumann = opt.mode == Mode::ExactLinearized
                        ? linearized_neumann(solver, c, out.dirichlet, m, opt.solver)
                        : nonlinear_neumann_difference(solver, c, out.dirichlet, m, opt.beta,
                                                       opt.solver);
  return out;
}

MeasurementSet measure_all(const HelmholtzSolver& solver, const PolarField& c,
                           const waves::ZetaSet& zeta, const MeasureOptions& opt) {
  NLSINV_REQUIRE(opt.noise_level >= 0.0, "measure_all: noise_level must be >= 0");
  NLSINV_REQUIRE(opt.beta > 0.0, "measure_all: beta must be > 0");
  NLSINV_REQUIRE(std::abs(zeta.k - solver.k()) <= 1e-14 * zeta.k,
                 "measure_all: probe and solver wavenumbers differ");
  MeasurementSet set;
  set.m = zeta.m;
  set.k = zeta.k;
  set.beta = opt.beta;
  set.mode = opt.mode;
  set.zeta = zeta;
  const auto ex = excitations(zeta, solver.grid());
  const pie::PieExpansion pe = pie::expand(zeta.m);
  set.per_subset.reserve(pe.terms.size());
  for (const pie::SubsetTerm& s : pe.terms) {
    try {
      set.per_subset.push_back(measure_subset(solver, c, ex, s, zeta.m, opt));
    } catch (const SolverError& e) {
      throw SolverError("subset mask " + std::to_string(s.mask) + ": " + e.what(), e.report());
    }
    if (opt.noise_level > 0.0)
      add_noise(set.per_subset.back().lin_neumann, opt.noise_level, opt.seed, zeta.freq.xi,
                s.mask);
  }
  return set;
}

std::vector<double> linearization_error_probe(const HelmholtzSolver& solver, const PolarField& c,
                                              const BoundaryTrace& f, int m,
                                              const std::vector<double>& gammas,
                                              const SolverConfig& cfg) {
  const BoundaryTrace lin = linearized_neumann(solver, c, f, m, cfg);
  const BoundaryTrace zero(solver.grid());
  std::vector<double> out;
  out.reserve(gammas.size());
  for (double gamma : gammas) {
    NLSINV_REQUIRE(gamma > 0.0 && gamma <= 1.0, "linearization_error_probe: gamma in (0, 1]");
    PolarField gc = c;
    gc *= gamma;
    // Lambda_{gc}(f) - Lambda_0(f) is the trace of the scattered part.
    NonlinearSolution sol = solve_nonlinear(solver, gc, m, f, cfg);
    BoundaryTrace diff = neumann_trace(sol.scattered, zero);
    diff -= gamma * lin;
    out.push_back(diff.l2_norm());
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace fs = std::filesystem;

void write_measurement_set(const MeasurementSet& mset, const std::string& dir) {
  fs::create_directories(dir);
  nlohmann::json meta = {
      {"m", mset.m},
      {"k", mset.k},
      {"beta", mset.beta},
      {"xi", {mset.freq().xi[0], mset.freq().xi[1]}},
      {"regime", mset.zeta.regime == waves::Regime::Propagating ? "propagating" : "evanescent"},
      {"mode", to_string(mset.mode)},
      {"masks", nlohmann::json::array()},
  };
  for (const auto& sm : mset.per_subset) {
    meta["masks"].push_back(sm.subset.mask);
    const std::string tag = std::to_string(sm.subset.mask) + ".csv";
    write_csv((fs::path(dir) / ("S_" + tag)).string(), sm.lin_neumann);
    write_csv((fs::path(dir) / ("D_" + tag)).string(), sm.dirichlet);
  }
  std::ofstream os(fs::path(dir) / "meta.json");
  if (!os) throw FormatError("cannot write meta.json in '" + dir + "'");
  os << meta.dump(2) << '\n';
}

MeasurementSet read_measurement_set(const std::string& dir) {
  std::ifstream is(fs::path(dir) / "meta.json");
  if (!is) throw FormatError("missing meta.json in '" + dir + "'");
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("meta.json: ") + e.what());
  }
  MeasurementSet set;
  try {
    set.m = meta.at("m").get<int>();
    set.k = meta.at("k").get<double>();
    set.beta = meta.at("beta").get<double>();
    set.mode = mode_from_string(meta.at("mode").get<std::string>());
    const Vec2 xi{meta.at("xi").at(0).get<double>(), meta.at("xi").at(1).get<double>()};
    set.zeta = waves::make_zeta(set.m, set.k, waves::Frequency::from_xi(xi));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("meta.json: ") + e.what());
  }
  const pie::PieExpansion pe = pie::expand(set.m);
  for (const pie::SubsetTerm& s : pe.terms) {
    const std::string tag = std::to_string(s.mask) + ".csv";
    SubsetMeasurement sm;
    sm.subset = s;
    sm.mode = set.mode;
    sm.lin_neumann = read_trace_csv((fs::path(dir) / ("S_" + tag)).string());
    sm.dirichlet = read_trace_csv((fs::path(dir) / ("D_" + tag)).string());
    set.per_subset.push_back(std::move(sm));
  }
  return set;
}

}  // namespace nlsinv::measure
