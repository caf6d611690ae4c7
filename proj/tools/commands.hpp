#pragma once

namespace anytrack::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitLoad = 3,
  kExitNoSolution = 4,
};

/// Parses argv and dispatches to `generate`, `track` or `compare`.
int run(int argc, char** argv);

}  // namespace anytrack::cli
