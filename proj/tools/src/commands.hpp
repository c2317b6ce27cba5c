#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ifrl::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitIo = 1,
  kExitValidation = 2,
  kExitUpstream = 3,
};

// Parses `args` (without the program name) and runs one command. Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ifrl::cli
