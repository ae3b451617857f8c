#pragma once

namespace tvc {

// Command-line entry point. Exit codes: 0 success, 1 runtime error, 2 usage
// error. Every subcommand prints a single summary line on success.
int run_command(int argc, const char* const* argv);

}  // namespace tvc
