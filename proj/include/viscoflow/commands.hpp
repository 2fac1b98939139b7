#pragma once

#include <exception>
#include <iosfwd>

#include "viscoflow/config.hpp"

namespace viscoflow {

/// Process exit codes shared by all commands.
enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitNumerical = 2 };

/// Maps a caught exception to an exit code: config, argument and IO errors
/// give 1, everything else 2.
int exit_code_for(const std::exception& e);

/// Each command writes into config.output_dir, reports progress to `log`
/// and returns an exit code; failures are described on `err`.
int cmd_simulate(const RunConfig& config, std::ostream& log, std::ostream& err);
int cmd_error_study(const RunConfig& config, std::ostream& log, std::ostream& err);
int cmd_stability(const RunConfig& config, std::ostream& log, std::ostream& err);
int cmd_demo_1d(const RunConfig& config, std::ostream& log, std::ostream& err);

}  // namespace viscoflow
