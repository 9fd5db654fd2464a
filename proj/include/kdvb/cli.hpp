#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kdvb {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitNumerical = 1, kExitUsage = 2 };

/// Subcommands: solve, find-wave, spectrum, instability, selftest.
int run_cli(int argc, char** argv);
/// Same, with args excluding the program name and explicit streams.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kdvb
