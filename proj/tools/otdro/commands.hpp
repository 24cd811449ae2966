#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace otdro::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kSolverError = 3 };

// Entry point of the `otdro` executable. args[0] is the program name.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace otdro::cli
