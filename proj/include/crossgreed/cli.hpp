#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace crossgreed::cli {

inline constexpr const char* kSchemaVersion = "1.0.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitVerificationFailed = 1,
  kExitInputError = 2,
  kExitCapacityError = 3,
};

// Runs `crossgreed <args...>` (program name excluded). Reports go to `out`
// unless --out names a file; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace crossgreed::cli
