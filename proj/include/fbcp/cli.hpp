#pragma once

#include <iosfwd>

namespace fbcp::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kFormatError = 2,
  kShapeError = 3,
  kNumericError = 4,
  kBadFlags = 5,
};

/// Parses the command line, runs one subcommand and maps errors to exit codes.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace fbcp::cli
