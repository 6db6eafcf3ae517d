#pragma once

#include <exception>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "kgfock/app/config.hpp"
#include "kgfock/app/report.hpp"

namespace kgfock::app {

enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,
  kValidation = 2,
  kStability = 3,
  kSolver = 4,
  kMissingGolden = 5,
};

const std::vector<std::string>& subcommands();

// Runs one computation; throws the library exceptions unchanged.
RunRecord execute(const std::string& subcommand, const ExperimentConfig& config);

int exit_code_for(const std::exception_ptr& error);

// Loads the config, executes, writes artifacts and reports on `out`/`err`. Never throws.
int run_command(const std::string& subcommand, const std::filesystem::path& config_path, std::ostream& out,
                std::ostream& err);

}  // namespace kgfock::app
