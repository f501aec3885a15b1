#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nearcol::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2 };

/// Runs one invocation; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nearcol::cli
