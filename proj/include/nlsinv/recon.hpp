#pragma once

// Fourier reconstruction of the potential from subset measurements.
//
// Frequencies are taken on the lattice step * Z^2 (step 2 pi by default), so
// with unit weights the synthesis sum_xi F[c](xi) exp(-i xi.x) is the
// truncated Fourier series of c on the unit square [-1/2, 1/2]^2.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nlsinv/config.hpp"
#include "nlsinv/measure.hpp"
#include "nlsinv/waves.hpp"

namespace nlsinv::recon {

struct PlanEntry {
  int n1 = 0, n2 = 0;  // xi = step * (n1, n2)
  waves::Frequency freq;
  double weight = 1.0;
};

struct FrequencyPlan {
  std::vector<PlanEntry> entries;  // sorted by |xi|, then angle in [0, 2 pi)
  double cutoff = 0.0;             // effective: min((m+1) k, override)
  double lattice_step = 2.0 * kPi;
};

/// All lattice points with 0 < |xi| <= min((m+1) k, cutoff_override). Throws
/// ParameterError when no lattice point qualifies.
FrequencyPlan plan_frequencies(int m, double k, double lattice_step = 2.0 * kPi,
                               std::optional<double> cutoff_override = std::nullopt);

/// (1/m!) sum_S sign(S) int_boundary lin_neumann_S * phi.
cdouble fourier_coefficient(const measure::MeasurementSet& mset, const BoundaryTrace& phi_trace);

/// exp(i zeta_0 . x) on the boundary.
BoundaryTrace phi_trace(const waves::ZetaSet& zeta, const PolarGrid& grid);

/// Grid counterpart of the boundary combination:
///   int_Omega c * prod_j exp(i zeta_j.x) * exp(i zeta_0.x) dx.
cdouble volume_oracle(const PolarField& c, const waves::ZetaSet& zeta);

enum class Status { Ok, Missing };
std::string to_string(Status s);

struct Coefficient {
  int n1 = 0, n2 = 0;
  Vec2 xi{};
  double weight = 1.0;
  cdouble value{};
  std::optional<cdouble> reference;  // closed-form transform when available
  Status status = Status::Ok;
  std::string message;  // failure reason for Missing entries
};

struct CoefficientTable {
  std::vector<Coefficient> entries;  // plan order
  std::size_t missing_count() const;
};

/// Closed-form coefficients of an analytic potential on the plan (value and
/// reference both set). Bypasses measurements.
CoefficientTable analytic_coefficients(const FrequencyPlan& plan, const PotentialSpec& spec);

/// Cartesian samples on linspace(-1/2, 1/2, n)^2; value(a, b) is at
/// (x1, x2) = (coord(a), coord(b)).
struct SynthesisGrid {
  int n = 0;
  std::vector<double> values;  // row-major in a
  double imag_residue = 0.0;   // max |Im| before the real part was taken

  double coord(int a) const { return n == 1 ? 0.0 : -0.5 + static_cast<double>(a) / (n - 1); }
  double operator()(int a, int b) const { return values[static_cast<std::size_t>(a) * n + b]; }
};

/// Re sum_{Ok entries} value * exp(-i xi.x) * weight.
SynthesisGrid synthesize(const CoefficientTable& coeffs, int n);

struct Metrics {
  double max_abs_error = 0.0;  // over synthesis points with |x| <= R
  double l2_error = 0.0;       // sqrt(h^2 sum e^2) over the same points
  double wall_seconds = 0.0;
  std::size_t missing_count = 0;
  bool partial = false;
};

/// Errors of c_inv against spec sampled on the same grid, inside the disk.
Metrics error_metrics(const SynthesisGrid& c_inv, const PotentialSpec& spec, double radius);

struct ReconstructionResult {
  RunConfig config;
  FrequencyPlan plan;
  CoefficientTable coefficients;
  SynthesisGrid c_inv;
  Metrics metrics;
};

/// Per-frequency progress: (done, total).
using Progress = std::function<void(std::size_t, std::size_t)>;

/// The full algorithm: plan, per-frequency probes and measurements, PIE
/// combination, synthesis and metrics. Frequencies run on cfg.threads
/// workers and are gathered in plan order; a SolverError on one frequency
/// marks it Missing and flags the result partial. A resonant k throws.
ReconstructionResult run(const RunConfig& cfg, const Progress& progress = {});

/// coefficients.csv, c_inv.csv, metrics.json and config_echo.json.
void write_result(const ReconstructionResult& res, const std::string& dir);

void write_coefficients_csv(const CoefficientTable& t, const std::string& path);
/// Rows i,j,x1,x2,c_inv,c_true with 1-based i (x1) and j (x2).
void write_synthesis_csv(const SynthesisGrid& g, const PotentialSpec& truth,
                         const std::string& path);
std::string metrics_json(const Metrics& m);

}  // namespace nlsinv::recon
