#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace phasefield::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 2,
    kDataError = 3,
    kNotConverged = 4,
};

/// Runs the command line `args` (args[0] is the program name). Normal output
/// goes to `out`; failures are reported as one JSON object on `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace phasefield::cli
