#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mongeampere::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitNotConverged = 2;
inline constexpr int kExitCheckFailed = 3;

/// Runs the command line `args` (args[0] is the program name). Results go to
/// `out`, one-line diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mongeampere::cli
