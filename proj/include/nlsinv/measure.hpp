#pragma once

// Synthetic boundary measurements for one target frequency: for each
// non-empty subset S of the m probes, the Dirichlet excitation sum_{j in S} f_j
// and an approximation of the linearized Neumann data at that excitation.

#include <cstdint>
#include <string>
#include <vector>

#include "nlsinv/grid.hpp"
#include "nlsinv/pie.hpp"
#include "nlsinv/solver.hpp"
#include "nlsinv/waves.hpp"

namespace nlsinv::measure {

enum class Mode {
  NonlinearDifference,  // beta^{-m} (d_nu u_S - d_nu u_S^(0)) from a nonlinear solve
  ExactLinearized,      // d_nu u_S^(1) from the linearized two-stage system
};

std::string to_string(Mode mode);
Mode mode_from_string(const std::string& s);

struct Excitation {
  PolarField field;     // exp(i zeta_j . x) on the grid
  BoundaryTrace trace;  // the same on the boundary: f_j
};

/// The m CE solutions u_j^(0) = exp(i zeta_j . x), j = 1..m.
std::vector<Excitation> excitations(const waves::ZetaSet& zeta, const PolarGrid& grid);

/// Sum of the member traces of S.
BoundaryTrace subset_dirichlet(const std::vector<Excitation>& ex, const pie::SubsetTerm& s);

/// Lambda'_c(f): solves (Delta_h + k^2) u0 = 0, u0 = f, then
/// (Delta_h + k^2) u1 = c u0^m, u1 = 0, and returns d_nu u1.
BoundaryTrace linearized_neumann(const HelmholtzSolver& solver, const PolarField& c,
                                 const BoundaryTrace& f, int m, const SolverConfig& cfg = {});

/// beta^{-m} (Lambda_c(beta f) - Lambda_0(beta f)), taken from the scattered
/// part of the nonlinear solution so no large traces are subtracted.
BoundaryTrace nonlinear_neumann_difference(const HelmholtzSolver& solver, const PolarField& c,
                                           const BoundaryTrace& f, int m, double beta,
                                           const SolverConfig& cfg = {});

struct SubsetMeasurement {
  pie::SubsetTerm subset;
  BoundaryTrace dirichlet;    // sum_{j in S} f_j, before beta scaling
  BoundaryTrace lin_neumann;  // approximation of Lambda'_c(dirichlet)
  Mode mode = Mode::NonlinearDifference;
};

struct MeasureOptions {
  double beta = 1e-2;
  Mode mode = Mode::NonlinearDifference;
  SolverConfig solver;
  double noise_level = 0.0;  // relative to the RMS of each trace
  std::uint64_t seed = 0;
};

struct MeasurementSet {
  int m = 0;
  double k = 0.0;
  double beta = 0.0;
  Mode mode = Mode::NonlinearDifference;
  waves::ZetaSet zeta;
  std::vector<SubsetMeasurement> per_subset;  // ascending bitmask order

  const waves::Frequency& freq() const { return zeta.freq; }
};

SubsetMeasurement measure_subset(const HelmholtzSolver& solver, const PolarField& c,
                                 const std::vector<Excitation>& ex, const pie::SubsetTerm& s,
                                 int m, const MeasureOptions& opt);

/// All 2^m - 1 subsets. A solver failure is rethrown as SolverError naming the
/// subset. Noise, when enabled, is seeded from (seed, xi, mask).
MeasurementSet measure_all(const HelmholtzSolver& solver, const PolarField& c,
                           const waves::ZetaSet& zeta, const MeasureOptions& opt);

/// ||Lambda_{gamma c}(f) - Lambda_0(f) - gamma Lambda'_c(f)|| in the discrete
/// L2(boundary) norm, one value per gamma.
std::vector<double> linearization_error_probe(const HelmholtzSolver& solver, const PolarField& c,
                                              const BoundaryTrace& f, int m,
                                              const std::vector<double>& gammas,
                                              const SolverConfig& cfg = {});

/// Directory layout: meta.json plus S_<mask>.csv (lin_neumann) and
/// D_<mask>.csv (Dirichlet excitation) per subset.
void write_measurement_set(const MeasurementSet& mset, const std::string& dir);
MeasurementSet read_measurement_set(const std::string& dir);

}  // namespace nlsinv::measure
