#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cfpp::cli {

enum ExitCode { kOk = 0, kValidation = 1, kRuntime = 2, kVerifyFailed = 3 };

/// Parses argv and runs the chosen subcommand. Diagnostics go to `err`,
/// summaries to `out`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cfpp::cli
