#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace critlab::cli {

// Exit codes of the command-line tool.
enum ExitCode : int {
  kOk = 0,
  kIncompatible = 1,  // check-compat residual above threshold
  kConfigError = 2,
  kDivergence = 3,    // non-finite state or domain exit
  kPrecondition = 4,  // sweep nominal violates the compatibility identity
  kUsage = 64,
};

// Runs one subcommand. args excludes the program name. Results go to `out`,
// diagnostics (one line each) to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace critlab::cli
