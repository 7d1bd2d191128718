#pragma once

#include <iosfwd>
#include <string>

#include "tmine/config.hpp"

namespace tmine::cli {

void run_synth(const RunConfig& config, std::ostream& log);
void run_ingest(const RunConfig& config, std::ostream& log);
void run_fit(const RunConfig& config, std::ostream& log);
void run_rank(const RunConfig& config, std::ostream& log);

/// Dispatches one subcommand and maps thrown errors onto the exit-code
/// contract: 0 success, 2 I/O, 3 user input, 4 numerical failure.
int run_command(const std::string& command, const RunConfig& config,
                std::ostream& log, std::ostream& err);

}  // namespace tmine::cli
