#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace swsr::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kDataError = 2,
  kDivergence = 3,
};

// Runs one subcommand. `args` excludes the program name. Results go to
// `out`, diagnostics and the effective configuration to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace swsr::cli
