#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace weq::cli {

// Runs the command line `args` (without the program name). Returns the exit
// code: 0 success / decided, 2 undecided (solve), 1 error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Name of the environment variable holding the JSON config path.
inline constexpr const char* kConfigEnv = "WEQ_CONFIG";

}  // namespace weq::cli
