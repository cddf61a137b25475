#pragma once
#include <iosfwd>
#include <string>
#include <vector>

namespace racecurve::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kComputeFailure = 1;
inline constexpr int kUsage = 2;

/// Runs one command line (without the program name). Tables go to `out`
/// unless --output names a file; the resolved configuration, warnings and
/// errors go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace racecurve::cli
