#pragma once

#include <ostream>

namespace entlayer {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitAssumption = 2;
inline constexpr int kExitSuiteFailure = 3;

/// Entry point of the `entlayer` tool; argv[0] is the program name.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace entlayer
