#pragma once

// `clockmps` subcommands. Numeric output goes to files under --out-dir;
// stdout gets a human-readable summary.

#include <iosfwd>

namespace clockmps::cli {

enum ExitCode : int { kOk = 0, kVerificationFailed = 1, kUsageError = 2 };

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace clockmps::cli
