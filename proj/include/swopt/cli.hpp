#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace swopt::cli {

/// Exit codes of `solve`; the other commands use 0 and kError.
inline constexpr int kStationary = 0;
inline constexpr int kError = 1;
inline constexpr int kStalled = 2;
inline constexpr int kMaxIter = 3;

/// Parses `args` (without the program name) and runs one subcommand.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int main(int argc, char** argv);

}  // namespace swopt::cli
