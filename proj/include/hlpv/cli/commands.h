#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace hlpv::cli {

/// Exit codes.
inline constexpr int kExitSuccess = 0;
inline constexpr int kExitInfeasible = 1;
inline constexpr int kExitNumerical = 2;
inline constexpr int kExitUsage = 64;

/// Runs one subcommand (analyze, synthesize, simulate, check, export-sdpa).
/// `args` excludes the program name. Result JSON goes to --out or, when
/// absent, to `out`; progress and diagnostics go to `err`.
int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hlpv::cli
