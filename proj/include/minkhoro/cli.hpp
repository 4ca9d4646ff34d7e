#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mh {

// Exit codes of the command-line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,      // failed checks or geometry errors
  kExitUsage = 2,        // bad arguments or config (with location)
  kExitLimit = 3,        // non-convergent or bounded sequences
  kExitEmptyLevel = 4,   // empty level set inside the box
};

// Runs `mh` with the arguments after the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mh
