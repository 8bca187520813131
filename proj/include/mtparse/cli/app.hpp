#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mtparse::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kConfigError = 2, kDataError = 3, kNumericError = 4 };

/// Runs the command line `args` (without the program name). Reports go to
/// `out`; failures are written to `err` as one JSON object
/// {"error": kind, "message": text, "exit_code": n}.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mtparse::cli
