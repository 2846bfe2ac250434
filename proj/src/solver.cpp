#include "nlsinv/solver.hpp"

#include <fftw3.h>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

namespace nlsinv {

std::string to_string(NonlinearMethod m) {
  return m == NonlinearMethod::Newton ? "newton" : "fixed_point";
}

NonlinearMethod nonlinear_method_from_string(const std::string& s) {
  if (s == "fixed_point") return NonlinearMethod::FixedPoint;
  if (s == "newton") return NonlinearMethod::Newton;
  throw ParameterError("unknown nonlinear method '" + s + "'");
}

void SolverConfig::validate() const {
  NLSINV_REQUIRE(linear_tol > 0.0 && nonlinear_tol > 0.0, "SolverConfig: tolerances must be > 0");
  NLSINV_REQUIRE(resonance_tol >= 0.0, "SolverConfig: resonance_tol must be >= 0");
  NLSINV_REQUIRE(max_fixed_point_iters > 0 && max_newton_iters > 0,
                 "SolverConfig: iteration limits must be positive");
}

namespace {

// FFTW's planner is not thread-safe; execution with the new-array API is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(cdouble* p) { return reinterpret_cast<fftw_complex*>(p); }

// Real tridiagonal system of one angular mode (same for modes n and N - n).
struct ModeSystem {
  std::vector<double> diag, sub, sup;  // sub[i] couples i to i-1, sup[i] couples i to i+1
};

ModeSystem mode_system(const std::vector<RingStencil>& st, int n, int ntheta, double k2) {
  const int nr = static_cast<int>(st.size());
  const double dtheta = 2.0 * kPi / ntheta;
  const double lambda_theta = 2.0 - 2.0 * std::cos(n * dtheta);
  const double parity = (n % 2 == 0) ? 1.0 : -1.0;
  ModeSystem s;
  s.diag.resize(nr);
  s.sub.assign(nr, 0.0);
  s.sup.assign(nr, 0.0);
  for (int i = 0; i < nr; ++i) {
    s.diag[i] = -st[i].lower - st[i].upper - st[i].angular * lambda_theta + k2;
    if (i > 0) s.sub[i] = st[i].lower;
    if (i < nr - 1) s.sup[i] = st[i].upper;
  }
  // Across-center neighbour u(r_0, theta + pi) picks up (-1)^n in mode n.
  s.diag[0] += st[0].lower * parity;
  // Ghost at R + dr/2: upper * (8/3 f - 2 u_last + 1/3 u_prev); f goes to the rhs.
  s.diag[nr - 1] -= 2.0 * st[nr - 1].upper;
  s.sub[nr - 1] += st[nr - 1].upper / 3.0;
  return s;
}

}  // namespace

std::vector<double> dirichlet_eigenvalues(const PolarGrid& grid) {
  const auto st = ring_stencils(grid);
  const int nr = grid.nr(), nt = grid.ntheta();
  std::vector<double> out;
  out.reserve(grid.size());
  for (int n = 0; n < nt; ++n) {
    const int rep = std::min(n, nt - n);
    ModeSystem s = mode_system(st, rep, nt, 0.0);
    Eigen::VectorXd d(nr), e(nr - 1);
    for (int i = 0; i < nr; ++i) d[i] = -s.diag[i];
    // Off-diagonal products are positive, so the matrix is similar to a
    // symmetric one with off-diagonals sqrt(sup_i * sub_{i+1}).
    for (int i = 0; i + 1 < nr; ++i) e[i] = -std::sqrt(s.sup[i] * s.sub[i + 1]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(d, e, Eigen::EigenvaluesOnly);
    for (int i = 0; i < nr; ++i) out.push_back(es.eigenvalues()[i]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------

struct HelmholtzSolver::Impl {
  PolarGrid grid;
  double k = 0.0;
  double gap = 0.0;
  double resonance_tol = 0.0;
  bool small_pivot = false;
  double ghost_weight = 0.0;  // upper_{Nr-1} * 8/3
  // Thomas factors per representative mode n = 0..ntheta/2.
  std::vector<std::vector<double>> cprime, inv_denom, sub;
  fftw_plan forward = nullptr, backward = nullptr;

  ~Impl() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

HelmholtzSolver::HelmholtzSolver(const PolarGrid& grid, double k, double resonance_tol)
    : impl_(std::make_unique<Impl>()) {
  NLSINV_REQUIRE(k > 0.0, "HelmholtzSolver: k must be positive");
  Impl& im = *impl_;
  im.grid = grid;
  im.k = k;
  im.resonance_tol = resonance_tol;
  const int nr = grid.nr(), nt = grid.ntheta();
  const double k2 = k * k;
  const auto st = ring_stencils(grid);
  im.ghost_weight = st[nr - 1].upper * 8.0 / 3.0;

  const int modes = nt / 2 + 1;
  im.cprime.resize(modes);
  im.inv_denom.resize(modes);
  im.sub.resize(modes);
  double gap = std::numeric_limits<double>::infinity();
  for (int n = 0; n < modes; ++n) {
    ModeSystem s = mode_system(st, n, nt, k2);
    double scale = 0.0;
    for (int i = 0; i < nr; ++i) scale = std::max(scale, std::abs(s.diag[i]));
    auto& cp = im.cprime[n];
    auto& inv = im.inv_denom[n];
    cp.resize(nr);
    inv.resize(nr);
    double prev_c = 0.0;
    for (int i = 0; i < nr; ++i) {
      const double denom = s.diag[i] - (i > 0 ? s.sub[i] * prev_c : 0.0);
      if (std::abs(denom) < 1e-12 * scale) im.small_pivot = true;
      inv[i] = 1.0 / denom;
      cp[i] = s.sup[i] * inv[i];
      prev_c = cp[i];
    }
    im.sub[n] = s.sub;

    Eigen::VectorXd d(nr), e(nr - 1);
    for (int i = 0; i < nr; ++i) d[i] = s.diag[i] - k2;
    for (int i = 0; i + 1 < nr; ++i) e[i] = std::sqrt(s.sup[i] * s.sub[i + 1]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(d, e, Eigen::EigenvaluesOnly);
    for (int i = 0; i < nr; ++i) gap = std::min(gap, std::abs(-es.eigenvalues()[i] - k2) / k2);
  }
  im.gap = gap;

  std::vector<cdouble> scratch(grid.size());
  int len[1] = {nt};
  std::lock_guard<std::mutex> lock(planner_mutex());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  im.forward = fftw_plan_many_dft(1, len, nr, as_fftw(scratch.data()), nullptr, 1, nt,
                                  as_fftw(scratch.data()), nullptr, 1, nt, FFTW_FORWARD, flags);
  im.backward = fftw_plan_many_dft(1, len, nr, as_fftw(scratch.data()), nullptr, 1, nt,
                                   as_fftw(scratch.data()), nullptr, 1, nt, FFTW_BACKWARD, flags);
  if (!im.forward || !im.backward) throw Error("HelmholtzSolver: FFTW planning failed");
}

HelmholtzSolver::~HelmholtzSolver() = default;

const PolarGrid& HelmholtzSolver::grid() const { return impl_->grid; }
double HelmholtzSolver::k() const { return impl_->k; }
double HelmholtzSolver::resonance_gap() const { return impl_->gap; }

bool HelmholtzSolver::near_resonance() const {
  return impl_->small_pivot || impl_->gap < impl_->resonance_tol;
}

PolarField HelmholtzSolver::solve_raw(const PolarField& source) const {
  return solve_raw(source, BoundaryTrace(impl_->grid));
}

PolarField HelmholtzSolver::solve_raw(const PolarField& source,
                                      const BoundaryTrace& dirichlet) const {
  const Impl& im = *impl_;
  NLSINV_REQUIRE(source.grid() == im.grid && dirichlet.grid() == im.grid,
                 "HelmholtzSolver: grid mismatch");
  const int nr = im.grid.nr(), nt = im.grid.ntheta();
  std::vector<cdouble> buf = source.values();
  for (int j = 0; j < nt; ++j)
    buf[static_cast<std::size_t>(nr - 1) * nt + j] -= im.ghost_weight * dirichlet[j];

  fftw_execute_dft(im.forward, as_fftw(buf.data()), as_fftw(buf.data()));
  for (int n = 0; n < nt; ++n) {
    const int rep = std::min(n, nt - n);
    const auto& cp = im.cprime[rep];
    const auto& inv = im.inv_denom[rep];
    const auto& sub = im.sub[rep];
    cdouble prev = 0.0;
    for (int i = 0; i < nr; ++i) {
      cdouble& v = buf[static_cast<std::size_t>(i) * nt + n];
      v = (v - sub[i] * prev) * inv[i];
      prev = v;
    }
    for (int i = nr - 2; i >= 0; --i) {
      cdouble& v = buf[static_cast<std::size_t>(i) * nt + n];
      v -= cp[i] * buf[static_cast<std::size_t>(i + 1) * nt + n];
    }
  }
  fftw_execute_dft(im.backward, as_fftw(buf.data()), as_fftw(buf.data()));
  const double scale = 1.0 / nt;
  for (cdouble& z : buf) z *= scale;
  PolarField out(im.grid);
  out.values() = std::move(buf);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

double area_l2(const PolarField& f) {
  const PolarGrid& g = f.grid();
  double s = 0.0;
  for (int i = 0; i < g.nr(); ++i) {
    double ring = 0.0;
    for (int j = 0; j < g.ntheta(); ++j) ring += std::norm(f(i, j));
    s += ring * g.r(i);
  }
  return std::sqrt(s * g.dr() * g.dtheta());
}

bool all_finite(const PolarField& f) {
  for (const cdouble& z : f.values())
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

[[noreturn]] void throw_resonant(const HelmholtzSolver& solver) {
  SolveReport rep;
  rep.condition_warning = true;
  rep.message = "k^2 is (numerically) a Dirichlet eigenvalue of -Delta_h; relative gap " +
                format_double(solver.resonance_gap());
  throw SolverError("solve_helmholtz: near-resonant wavenumber, " + rep.message, rep);
}

// Rounding level of the residual itself: 16 eps ||(|A| |u| + |s|)||, where
// |A| sums the absolute stencil weights. The inner-ring angular weight grows
// like 1 / (dr dtheta)^2, so on fine grids this can exceed linear_tol.
double residual_roundoff(const PolarField& u, const PolarField& source,
                         const BoundaryTrace& dirichlet, double k) {
  const PolarGrid& g = u.grid();
  const auto st = ring_stencils(g);
  PolarField mag(g);
  for (int i = 0; i < g.nr(); ++i) {
    const RingStencil& s = st[i];
    const double w = 2.0 * (s.lower + s.upper + 2.0 * s.angular) + 3.0 * s.upper + k * k;
    for (int j = 0; j < g.ntheta(); ++j) {
      double v = w * std::abs(u(i, j)) + std::abs(source(i, j));
      if (i == g.nr() - 1) v += s.upper * (8.0 / 3.0) * std::abs(dirichlet[j]);
      mag(i, j) = v;
    }
  }
  constexpr double eps = std::numeric_limits<double>::epsilon();
  return 16.0 * eps * area_l2(mag) /
         (area_l2(source) + k * k * dirichlet.l2_norm() + 1.0);
}

}  // namespace

double helmholtz_residual(const PolarField& u, const PolarField& source,
                          const BoundaryTrace& dirichlet, double k) {
  PolarField r = helmholtz_apply(u, k, dirichlet);
  r -= source;
  return area_l2(r) / (area_l2(source) + k * k * dirichlet.l2_norm() + 1.0);
}

std::pair<PolarField, SolveReport> solve_helmholtz(const HelmholtzSolver& solver,
                                                   const PolarField& source,
                                                   const BoundaryTrace& dirichlet,
                                                   const SolverConfig& cfg) {
  if (solver.near_resonance()) throw_resonant(solver);
  PolarField u = solver.solve_raw(source, dirichlet);
  SolveReport rep;
  rep.iterations = 1;
  rep.final_residual = helmholtz_residual(u, source, dirichlet, solver.k());
  const double tol =
      std::max(cfg.linear_tol, residual_roundoff(u, source, dirichlet, solver.k()));
  rep.converged = std::isfinite(rep.final_residual) && rep.final_residual <= tol;
  if (!rep.converged) {
    rep.condition_warning = true;
    rep.message = "linear residual " + format_double(rep.final_residual) + " above tolerance";
    throw SolverError("solve_helmholtz: " + rep.message, rep);
  }
  return {std::move(u), std::move(rep)};
}

std::pair<PolarField, SolveReport> solve_helmholtz(const PolarField& source,
                                                   const BoundaryTrace& dirichlet, double k,
                                                   const SolverConfig& cfg) {
  NLSINV_REQUIRE(k > 1.0, "solve_helmholtz: k must be > 1");
  HelmholtzSolver solver(source.grid(), k, cfg.resonance_tol);
  return solve_helmholtz(solver, source, dirichlet, cfg);
}

// ---------------------------------------------------------------------------

namespace {

using SparseMatrix = Eigen::SparseMatrix<cdouble>;

// Delta_h + k^2 with zero Dirichlet data folded into the last ring.
SparseMatrix assemble_helmholtz(const PolarGrid& g, double k) {
  const int nr = g.nr(), nt = g.ntheta(), half = nt / 2;
  const auto st = ring_stencils(g);
  auto idx = [nt](int i, int j) { return i * nt + j; };
  std::vector<Eigen::Triplet<cdouble>> trip;
  trip.reserve(g.size() * 6);
  for (int i = 0; i < nr; ++i) {
    for (int j = 0; j < nt; ++j) {
      const int row = idx(i, j);
      double diag = -st[i].lower - st[i].upper - 2.0 * st[i].angular + k * k;
      if (i == 0) {
        if (st[0].lower != 0.0) trip.emplace_back(row, idx(0, (j + half) % nt), st[0].lower);
      } else {
        trip.emplace_back(row, idx(i - 1, j), st[i].lower);
      }
      if (i == nr - 1) {
        diag -= 2.0 * st[i].upper;
        trip.emplace_back(row, idx(i - 1, j), st[i].upper / 3.0);
      } else {
        trip.emplace_back(row, idx(i + 1, j), st[i].upper);
      }
      trip.emplace_back(row, idx(i, (j + nt - 1) % nt), st[i].angular);
      trip.emplace_back(row, idx(i, (j + 1) % nt), st[i].angular);
      trip.emplace_back(row, row, diag);
    }
  }
  SparseMatrix a(static_cast<Eigen::Index>(g.size()), static_cast<Eigen::Index>(g.size()));
  a.setFromTriplets(trip.begin(), trip.end());
  return a;
}

PolarField power_source(const PolarField& c, const PolarField& u, int m) {
  PolarField out(c.grid());
  auto& o = out.values();
  const auto& cv = c.values();
  const auto& uv = u.values();
  for (std::size_t n = 0; n < o.size(); ++n) {
    cdouble p = 1.0;
    for (int e = 0; e < m; ++e) p *= uv[n];
    o[n] = cv[n] * p;
  }
  return out;
}

class Divergence {
 public:
  bool growing(double update) {
    streak_ = (update > last_) ? streak_ + 1 : 0;
    last_ = update;
    return streak_ >= 3;
  }

 private:
  double last_ = std::numeric_limits<double>::infinity();
  int streak_ = 0;
};

}  // namespace

NonlinearSolution solve_nonlinear(const HelmholtzSolver& solver, const PolarField& c, int m,
                                  const BoundaryTrace& dirichlet, const SolverConfig& cfg) {
  cfg.validate();
  NLSINV_REQUIRE(m >= 1, "solve_nonlinear: m must be >= 1");
  NLSINV_REQUIRE(c.grid() == solver.grid() && dirichlet.grid() == solver.grid(),
                 "solve_nonlinear: grid mismatch");
  const PolarGrid& g = solver.grid();
  auto [u0, rep0] = solve_helmholtz(solver, PolarField(g), dirichlet, cfg);

  NonlinearSolution sol;
  sol.background = u0;
  PolarField w(g);
  SolveReport rep;
  Divergence div;
  const bool newton = cfg.method == NonlinearMethod::Newton;
  const int max_iters = newton ? cfg.max_newton_iters : cfg.max_fixed_point_iters;

  SparseMatrix base;
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  if (newton) {
    base = assemble_helmholtz(g, solver.k());
    lu.analyzePattern(base);
  }

  for (int it = 1; it <= max_iters; ++it) {
    PolarField u = u0 + w;
    PolarField next(g);
    if (!newton) {
      next = solve_helmholtz(solver, power_source(c, u, m), BoundaryTrace(g), cfg).first;
    } else {
      // F(w) = A w - c u^m,  J = A - m c u^{m-1}
      const auto n = static_cast<Eigen::Index>(g.size());
      Eigen::Map<const Eigen::VectorXcd> wv(w.values().data(), n);
      PolarField src = power_source(c, u, m);
      Eigen::Map<const Eigen::VectorXcd> sv(src.values().data(), n);
      Eigen::VectorXcd residual = base * wv - sv;
      SparseMatrix jac = base;
      for (Eigen::Index q = 0; q < n; ++q) {
        cdouble p = static_cast<double>(m) * c.values()[q];
        for (int e = 0; e < m - 1; ++e) p *= u.values()[q];
        jac.coeffRef(q, q) -= p;
      }
      lu.factorize(jac);
      if (lu.info() != Eigen::Success) {
        rep.condition_warning = true;
        rep.message = "Newton Jacobian factorization failed";
        throw SolverError("solve_nonlinear: " + rep.message, rep);
      }
      Eigen::VectorXcd delta = lu.solve(-residual);
      next = w;
      for (Eigen::Index q = 0; q < n; ++q) next.values()[q] += delta[q];
    }
    if (!all_finite(next)) {
      rep.message = "non-finite iterate; reduce the boundary data scale beta";
      throw SolverError("solve_nonlinear: " + rep.message, rep);
    }
    PolarField diff = next - w;
    const double update = diff.sup_norm();
    w = std::move(next);
    rep.iterations = it;
    rep.update_norms.push_back(update);
    const double unorm = (u0 + w).sup_norm();
    rep.final_residual = update / (1.0 + unorm);
    if (update <= cfg.nonlinear_tol * (1.0 + unorm)) {
      rep.converged = true;
      break;
    }
    if (div.growing(update)) {
      rep.message = "iteration diverging (update grew 3 times in a row); reduce beta";
      throw SolverError("solve_nonlinear: " + rep.message, rep);
    }
  }
  if (!rep.converged) {
    rep.message = "no convergence within " + std::to_string(max_iters) + " iterations";
    throw SolverError("solve_nonlinear: " + rep.message, rep);
  }
  sol.u = u0 + w;
  sol.scattered = std::move(w);
  sol.report = std::move(rep);
  return sol;
}

}  // namespace nlsinv
