#pragma once

#include <string>
#include <vector>

namespace gexpect {

/// Command-line front end. Subcommands: gheat, expect, lln, clt, approx.
/// Exit status: 0 on success, 2 on validation failure (bad flags or
/// config, non-admissible family), 1 on numerical failure (CFL
/// violation, state-cap overflow). Nothing is written on failure.
int run_cli(int argc, const char* const* argv);

/// Convenience overload for in-process invocation; args exclude the
/// program name, e.g. {"clt", "--sigmas", "0.5,1.0", ...}.
int run_cli(const std::vector<std::string>& args);

} // namespace gexpect
