#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace densekit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Runs one subcommand. `args` excludes the program name, e.g.
/// {"eval", "--gt", "gt.json", "--dets", "dets.json"}.
/// Returns 0 on success, 1 on usage errors, 2 on data errors.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace densekit::cli
