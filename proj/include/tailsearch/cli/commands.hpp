#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tailsearch::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitVerifyFailed = 2;

// Entry point shared by the `tailsearch` binary and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tailsearch::cli
