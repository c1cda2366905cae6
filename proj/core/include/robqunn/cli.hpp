#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace robqunn::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,    // bad flags or unknown command
  kConfig = 2,   // malformed or invalid configuration
  kData = 3,     // unreadable dataset, missing or corrupt checkpoint
  kRuntime = 4,  // anything else that fails during a run
};

/// robqunn <train|attack|transfer|metrics|report|all> [flags]
int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace robqunn::cli
