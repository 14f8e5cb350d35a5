#pragma once

#include <iosfwd>

namespace elasticlane::cli {

enum ExitCode : int {
  kOk = 0,
  kParseError = 2,
  kCapacityExceeded = 3,
  kDiverged = 4,
  kCheckFailed = 5,
};

/// Entry point of the elasticlane command line; reports go to `out`,
/// diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace elasticlane::cli
