#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ph::cli {

enum ExitCode { Pass = 0, Fail = 1, Inconclusive = 2, UsageError = 3 };

// args excludes the program name. Reports go to files when requested, else to
// out; diagnostics go to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ph::cli
