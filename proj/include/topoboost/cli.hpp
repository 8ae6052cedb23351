#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace topoboost::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Runs one command line (args[0] is the program name). Usage problems return
/// 1, data and I/O problems 2; diagnostics go to err.
int dispatch(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace topoboost::cli
