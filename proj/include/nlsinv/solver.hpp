#pragma once

// Linear Helmholtz solves on the polar grid and the nonlinear forward problem
//   Delta u + k^2 u - c u^m = 0  in the disk,  u = f  on the boundary.

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "nlsinv/error.hpp"
#include "nlsinv/grid.hpp"

namespace nlsinv {

enum class NonlinearMethod { FixedPoint, Newton };

std::string to_string(NonlinearMethod m);
NonlinearMethod nonlinear_method_from_string(const std::string& s);

struct SolverConfig {
  double linear_tol = 1e-10;
  double nonlinear_tol = 1e-10;
  int max_fixed_point_iters = 100;
  int max_newton_iters = 25;
  NonlinearMethod method = NonlinearMethod::FixedPoint;
  // k^2 closer than this (relative) to a discrete Dirichlet eigenvalue is
  // treated as resonant.
  double resonance_tol = 1e-9;

  void validate() const;
  bool operator==(const SolverConfig&) const = default;
};

struct SolveReport {
  int iterations = 0;
  double final_residual = 0.0;
  bool converged = false;
  bool condition_warning = false;
  std::vector<double> update_norms;  // nonlinear solves only
  std::string message;
};

class SolverError : public Error {
 public:
  SolverError(const std::string& what, SolveReport report)
      : Error(what), report_(std::move(report)) {}
  const SolveReport& report() const { return report_; }

 private:
  SolveReport report_;
};

/// Sorted Dirichlet eigenvalues of -Delta_h on the grid (all Nr * Ntheta).
std::vector<double> dirichlet_eigenvalues(const PolarGrid& grid);

/// Direct solver for (Delta_h + k^2) u = s with Dirichlet data. The operator is
/// diagonalized by a DFT in theta; each angular mode is a real tridiagonal
/// system in r whose factorization is computed once at construction. The
/// object is immutable after construction and may be shared across threads.
class HelmholtzSolver {
 public:
  HelmholtzSolver(const PolarGrid& grid, double k, double resonance_tol = 1e-9);
  ~HelmholtzSolver();
  HelmholtzSolver(const HelmholtzSolver&) = delete;
  HelmholtzSolver& operator=(const HelmholtzSolver&) = delete;

  const PolarGrid& grid() const;
  double k() const;

  /// min_i |mu_i - k^2| / k^2 over the discrete Dirichlet eigenvalues mu_i.
  double resonance_gap() const;
  bool near_resonance() const;

  /// Unchecked solve. Prefer solve_helmholtz().
  PolarField solve_raw(const PolarField& source, const BoundaryTrace& dirichlet) const;
  PolarField solve_raw(const PolarField& source) const;  // zero Dirichlet data

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Relative residual  ||(Delta_h + k^2) u - s|| / (||s|| + k^2 ||f|| + 1)  in
/// area-weighted L2(Omega) / L2(boundary) norms.
double helmholtz_residual(const PolarField& u, const PolarField& source,
                          const BoundaryTrace& dirichlet, double k);

/// Throws SolverError (condition_warning set) near resonance or when the
/// residual exceeds cfg.linear_tol. On fine grids the rounding level of the
/// residual (about 16 eps || |A| |u| ||, relative) replaces linear_tol when it
/// is larger.
std::pair<PolarField, SolveReport> solve_helmholtz(const HelmholtzSolver& solver,
                                                   const PolarField& source,
                                                   const BoundaryTrace& dirichlet,
                                                   const SolverConfig& cfg = {});

/// Builds a one-off solver for (grid, k).
std::pair<PolarField, SolveReport> solve_helmholtz(const PolarField& source,
                                                   const BoundaryTrace& dirichlet, double k,
                                                   const SolverConfig& cfg = {});

struct NonlinearSolution {
  PolarField u;           // full solution
  PolarField background;  // u0: linear solve with the same Dirichlet data
  PolarField scattered;   // u - u0 (zero Dirichlet data), kept separately to
                          // avoid cancellation when it is tiny
  SolveReport report;
};

/// Solves Delta_h u + k^2 u - c u^m = 0 with u = f on the boundary. Both
/// methods iterate on the scattered part w = u - u0 starting from w = 0:
///   FixedPoint: (Delta_h + k^2) w_{n+1} = c (u0 + w_n)^m
///   Newton:     (Delta_h + k^2 - m c u_n^{m-1}) delta = -F(w_n)
/// and stop when ||update||_inf <= nonlinear_tol (1 + ||u||_inf).
NonlinearSolution solve_nonlinear(const HelmholtzSolver& solver, const PolarField& c, int m,
                                  const BoundaryTrace& dirichlet, const SolverConfig& cfg = {});

}  // namespace nlsinv
