#pragma once

#include "lilypad/config.hpp"

namespace lilypad {

// Executes one configured run and writes its artifacts under cfg.out_dir.
// Returns the process exit status: 0 on success (including a passing scenario
// check), nonzero after printing a single-line error to stderr. A nonempty
// T_ladder repeats the run once per T value in a subdirectory.
int run_cli(const RunConfig& cfg);

}  // namespace lilypad
