#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace probrobust::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_verdict_fail = 1;
inline constexpr int exit_usage = 2;
inline constexpr int exit_invalid = 3;

/// Runs one `probrobust` invocation. `args` excludes the program name.
/// Summaries go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace probrobust::cli
