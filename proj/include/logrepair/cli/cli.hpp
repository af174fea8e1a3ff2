#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace logrepair::cli {

/// Exit status of run().
enum ExitCode : int { kOk = 0, kValidationError = 1, kRuntimeError = 2 };

/// Runs one subcommand (generate, mask, tune, train, evaluate, repair).
/// `args` excludes the program name. Progress and diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace logrepair::cli
