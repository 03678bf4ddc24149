#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace framepick::cli {

/// Runs the framepick command line. `args` excludes the program name.
/// Returns the process exit code: 0 success, 1 validation or usage,
/// 2 adapter or protocol, 3 I/O.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace framepick::cli
