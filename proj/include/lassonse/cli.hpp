#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lassonse::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

/// Parses `args` (without the program name) and runs one subcommand:
/// dist, map, predict, tune, phase, gordon or validate. Results go to `out`
/// unless --out names a file; diagnostics go to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err);

}  // namespace lassonse::cli
