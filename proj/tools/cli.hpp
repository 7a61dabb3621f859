#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace esocp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitEngine = 1;
inline constexpr int kExitUsage = 2;

/// Runs the command line `args` (without the program name) and returns the exit code.
/// `--manifest FILE` replays a manifest written by an earlier run; flags given next to it
/// override the recorded values.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace esocp::cli
