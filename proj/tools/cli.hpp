#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fcrepair::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kParse = 2,         ///< unreadable or malformed input, unwritable output
    kPrecondition = 3,  ///< input violates a requirement; also failed --strict check
    kResource = 4,      ///< state, subset or iteration bound hit
};

/// Runs one command line (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fcrepair::cli
