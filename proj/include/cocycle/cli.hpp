#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cocycle::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kInvalidInput = 2,
  kEnvelopeExceeded = 3,
  kInvariantViolation = 4,
};

// Desk-scale limits; larger inputs need --force.
struct Envelope {
  int alphabet = 4;
  int dim = 8;
  int window = 3;
  int depth = 16;
  int orbits = 10;
};

/// Runs the command line `args` (without the program name). Data goes to
/// `out`, diagnostics to `err`; nothing is written to `out` unless the
/// command succeeds.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cocycle::cli
