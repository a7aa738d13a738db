#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qbif::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,       // internal error
  kInputError = 2,    // bad flags or input files
  kUnsupported = 3,   // infeasible mechanism or unsupported game class
  kStalled = 4,       // schedule did not settle
};

/// Runs one command. `args` excludes the program name. Human-readable text
/// goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qbif::cli
