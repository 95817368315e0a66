#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace stepfit {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitMismatch = 2;

/// Runs the command line front end; args exclude the program name.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace stepfit
