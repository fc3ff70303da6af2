#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace driftev {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// Runs the command line (args[0] is the program name). Normal output goes to
/// out; failures are reported as one JSON object on err and mapped to
/// kExitConfig or kExitNumerical.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace driftev
