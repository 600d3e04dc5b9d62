#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "beamstab_cli/config.hpp"

namespace beamstab::cli {

struct CommandOptions {
  std::string out_dir;  // overrides output.dir when non-empty
  int dump_modes = 0;   // write matrix-market files for modes 1..dump_modes
};

const std::vector<std::string>& command_names();

// Runs one command. Throws beamstab::Error subclasses on failure; returns the exit code
// (0 success, 3 when a check battery reports failures).
int run_command(const std::string& name, const RunConfig& config, const CommandOptions& options, std::ostream& log);

// Maps an exception to the documented exit code: 2 config/spec, 3 numeric.
int exit_code_for(const std::exception& error);

}  // namespace beamstab::cli
