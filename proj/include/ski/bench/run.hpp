#pragma once

#include <iosfwd>
#include <string>

#include "ski/bench/config.hpp"

namespace ski::bench {

enum ExitCode : int { kPass = 0, kAssertionFailure = 1, kUsageError = 2, kNumericalError = 3 };

/// Calibrates, runs the requested experiments, writes CSVs and summary.json
/// to cfg.output_path and returns the exit code. Failures are named on `log`.
int run(const SweepConfig& cfg, std::ostream& log);

/// Prints the calibrated constants for every needed dimension as JSON.
int calibrate_command(const SweepConfig& cfg, std::ostream& out, std::ostream& log);

/// Quick examples suite: closed-form and oracle checks of each module.
int selftest(std::ostream& out);

/// Maps a library exception to an exit code.
int exit_code_for(const std::exception& e);

}  // namespace ski::bench
