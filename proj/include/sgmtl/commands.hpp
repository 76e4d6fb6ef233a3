#pragma once

#include <string>
#include <vector>

// CLI entry points. main() is a thin wrapper around run_cli so the argument
// handling, exit codes, and output files are all testable in-process.
//
// Exit codes: 0 success, 1 solver/numerical failure, 2 usage or I/O errors.
namespace sgmtl {

inline constexpr int kExitOk = 0;
inline constexpr int kExitSolver = 1;
inline constexpr int kExitUsage = 2;

// Parses `args` (excluding argv[0]) and dispatches to a subcommand:
//   generate     write a synthetic dataset directory
//   fit          fit one method on a dataset, write a result JSON
//   cv           k-fold cross-validation over a hyperparameter grid
//   sweep-n      CV MSE as a function of the group count N
//   samplesweep  sample-complexity sweep over training sizes
// Every result file embeds a run manifest (command line, config, seed,
// dataset fingerprint, tool version, duration). Reruns with the same inputs
// are byte-identical except for the duration field.
int run_cli(const std::vector<std::string>& args);

int run_cli(int argc, char** argv);

}  // namespace sgmtl
