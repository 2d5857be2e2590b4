#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace snc::cli {

// Exit status for command-line usage errors. Engine errors exit with
// kErrorExitBase + their ErrorCode value.
inline constexpr int kUsageExit = 2;
inline constexpr int kErrorExitBase = 10;

// Runs the command line `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace snc::cli
