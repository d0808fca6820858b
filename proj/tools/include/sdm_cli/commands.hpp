#pragma once

#include <iosfwd>

namespace sdm::cli {

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUserError = 1;
inline constexpr int kExitInternalError = 2;

/**
 * @brief Entry point behind the sdm executable.
 *
 * Reports go to out and diagnostics to err; the return value is the process
 * exit code.
 */
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sdm::cli
