#pragma once

#include "config.hpp"

#include <iosfwd>
#include <string>

namespace ballsaddle::cli {

enum ExitCode : int {
  kPass = 0,
  kUsage = 1,
  kHypothesisViolation = 2,
  kCheckFailure = 3,
  kNonConvergence = 4,
};

struct Outcome {
  int exit_code = kPass;
  json document;
  std::string summary;
};

/// "1".."7": which result the command certifies.
std::string theorem_for(const RunConfig& cfg);

/// Executes the command and builds its certificate. Library errors are mapped
/// to exit codes; the document then carries an "error" block instead of a solution.
Outcome run(const RunConfig& cfg);

/// Re-checks a certificate produced by run() at its recorded point, seeds and
/// tolerances, without solving again.
Outcome verify(const json& certificate);

/// The whole command line: `ballsaddle <command> --config <path> [--r <val>]
/// [--seed <n>] [--out <path>] [--heuristic]`. Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Writes `text` to a temporary file next to `path` and renames it into place.
void write_atomically(const std::string& path, const std::string& text);

}  // namespace ballsaddle::cli
