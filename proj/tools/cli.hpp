#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nile::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitUsage = 2;

/// Runs the `nile` command line. Exit code 0 on success, 2 on usage or
/// configuration errors, 1 on anything else.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nile::cli
