#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace trendrev::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsageError = 2,
  kDataError = 3,
  kNumericalError = 4,
};

/// Runs one invocation. args[0] is the program name. Results go to files named
/// by the arguments; `out` receives summaries, `err` warnings and the one-line
/// error message.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace trendrev::cli
