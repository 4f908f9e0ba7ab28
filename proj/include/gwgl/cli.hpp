#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gwgl::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

/// Runs one subcommand. `args` excludes the program name. Reports go to
/// --out when given, otherwise to `out`; messages go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace gwgl::cli
