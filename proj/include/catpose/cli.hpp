#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace catpose::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitFitFailure = 2;

// Runs the command line `args` (args[0] is the program name), writing normal
// output to `out` and diagnostics to `err`. Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);


}  // namespace catpose::cli
