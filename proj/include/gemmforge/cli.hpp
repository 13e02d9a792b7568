#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gemmforge::cli {

// Runs one CLI invocation (argv without the program name). Exit codes:
// 0 success, 1 domain or infeasibility error, 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gemmforge::cli
