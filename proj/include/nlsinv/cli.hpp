#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nlsinv::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,     // I/O and other unexpected errors
  kValidation = 2,  // a check breached its tolerance, or bad arguments/config
  kSolver = 3,      // resonance, divergence or non-convergence
  kPartial = 4,     // reconstruction finished with missing coefficients
};

/// Entry point of the nlsinv tool; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nlsinv::cli
