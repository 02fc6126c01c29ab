#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace drs::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitNotSolved = 2;

/// Runs `drsolve` with `args` (without the program name). Normal output goes
/// to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// key=value lines; '#' starts a comment, blank lines are ignored. Throws
/// drs::ParseError on malformed lines.
std::vector<std::pair<std::string, std::string>> parse_config(const std::string& text);

}  // namespace drs::cli
