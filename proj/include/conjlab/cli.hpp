#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace conjlab::cli {

// Parses argv (without the program name), dispatches the subcommand and
// writes structured results to out, diagnostics to err.
// Exit codes: 0 success, 2 usage error, 3 validation error, 4 I/O error,
// 10 counterexample found (a conjectured floor was violated).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

inline constexpr int kExitCounterexample = 10;

}  // namespace conjlab::cli
