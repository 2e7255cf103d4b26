#pragma once

#include <iosfwd>

namespace spingain::cli {

enum ExitCode : int { kOk = 0, kNumericFailure = 1, kInvalidConfig = 2, kUnwritablePath = 3 };

/// Runs `spingain <gain|sweep|fit|figure|selftest> [options]`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace spingain::cli
