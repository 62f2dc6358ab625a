#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cifc {

enum ExitCode : int { exit_ok = 0, exit_invalid = 1, exit_verification_failed = 2 };

// args excludes the program name. Machine-readable results go to out, errors
// (as a JSON object) and usage text to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cifc
