#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tbea::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,    // usage or configuration error
  kData = 2,     // data error
  kNumeric = 3,  // numeric failure
};

/// Runs the command line `args` (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tbea::cli
