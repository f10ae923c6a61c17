#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace asp::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int { kSuccess = 0, kInputError = 1, kNotConverged = 2 };

/// Runs the command line `args` (args[0] is the program name). Reports go to the
/// output directory; progress and diagnostics go to `out` / `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace asp::cli
