#pragma once

// Run configuration shared by the CLI, the reconstruction driver and the
// Python bindings. JSON parsing is strict: unknown keys are rejected.

#include <cstdint>
#include <optional>
#include <string>

#include "nlsinv/grid.hpp"
#include "nlsinv/measure.hpp"
#include "nlsinv/solver.hpp"

namespace nlsinv {

struct GridConfig {
  int nr = 128;
  int ntheta = 256;
  double radius = 0.5;
  bool operator==(const GridConfig&) const = default;
};

struct RunConfig {
  int m = 4;
  double k = 5.0;
  double beta = 1e-2;
  GridConfig grid;
  int synthesis_grid = 90;
  PotentialSpec potential = PotentialSpec::default_gaussian();
  measure::Mode mode = measure::Mode::NonlinearDifference;
  double noise_level = 0.0;
  SolverConfig solver;
  std::optional<double> cutoff_override;
  double lattice_step = 2.0 * kPi;
  std::string output_dir = "run";
  std::uint64_t seed = 0;
  int threads = 0;  // 0: hardware concurrency

  /// Throws ParameterError on any bound violation.
  void validate() const;
  bool operator==(const RunConfig&) const = default;
};

/// Throws FormatError on malformed JSON, unknown keys or wrong types, and
/// ParameterError when the parsed values violate a bound.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

/// Full echo (every key present); parse_run_config(to_json(c)) == c.
std::string to_json(const RunConfig& cfg);

}  // namespace nlsinv
