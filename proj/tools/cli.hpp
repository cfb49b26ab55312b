#pragma once

// The chainstamp command-line tool, callable in-process for tests.

#include <iosfwd>
#include <string>
#include <vector>

namespace chainstamp::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitNotVerified = 1,
    kExitUnreadableInput = 2,
    kExitNetwork = 3,
    kExitRejected = 4,
    kExitBadBundle = 5,
    kExitInvalidChain = 6,
    kExitConfig = 7,
};

inline constexpr const char* kDefaultServer = "http://127.0.0.1:8841";

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

} // namespace chainstamp::cli
