#pragma once

#include <iosfwd>

namespace fracsurf::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kNotConverged = 3,  // also used when the hyperbolicity certificate is refused
  kVerificationFailed = 4,
};

/// Entry point of the `fracsurf` tool. Progress goes to `out`, diagnostics to
/// `err`; the return value is the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fracsurf::cli
