#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace msunmix::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kDataError = 3,
  kNumericalError = 4,
};

/// Runs the command line `args` (program name excluded). Diagnostics go to
/// `err`, help text to `out`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace msunmix::cli
