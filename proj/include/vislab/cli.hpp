#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vislab {

enum ExitCode : int { kExitOk = 0, kExitRuntime = 1, kExitUsage = 2 };

/// Entry point of the `vislab` tool. args excludes the program name. JSON goes to out only
/// on success; diagnostics go to err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vislab
