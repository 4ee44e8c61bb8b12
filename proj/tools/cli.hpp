#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace powexp::cli {

/// Exit statuses of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1; // bad flags or a library error
inline constexpr int kExitIo = 2;

/// Runs one `powexp` invocation. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace powexp::cli
