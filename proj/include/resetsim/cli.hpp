#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace resetsim::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericError = 3, kPartial = 4 };

/// Entry point of the `resetsim` tool; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace resetsim::cli
