#pragma once

#include <ostream>
#include <span>
#include <string>
#include <string_view>

namespace swarmlink {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;  // bad arguments, unreadable or invalid config, I/O failure
inline constexpr int kExitExperimentFailed = 2;

/// Runs the command line `args` (program name excluded) with output on `out` and diagnostics and
/// logs on `err`. Returns the process exit code.
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);

/// Hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

}  // namespace swarmlink
