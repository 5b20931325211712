#pragma once

#include <iosfwd>

namespace xvh::cli {

// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kError = 1,             // bad input, I/O failure
  kUsage = 2,             // unknown flag, malformed value
  kObjectiveIncrease = 3, // solver aborted on an objective increase
  kNumerical = 4,         // numerical breakdown
};

// Runs one command (synth, train, encode, eval, sweep, report).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace xvh::cli
