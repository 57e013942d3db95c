#pragma once

#include <iosfwd>

namespace oscdecon {

/// Exit codes shared by every subcommand.
enum ExitCode : int { kExitOk = 0, kExitUsage = 2, kExitEmpty = 3 };

/// Entry point for `oscdecon synth|analyze|filter|response|serve`. Data and
/// JSON go to `out`, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace oscdecon
