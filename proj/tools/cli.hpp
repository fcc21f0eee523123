#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tvrec::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 2;      // bad flags or config
inline constexpr int kData = 3;       // unreadable or inconsistent input
inline constexpr int kInvariant = 4;  // internal invariant violation

/// Runs one command; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace tvrec::cli
