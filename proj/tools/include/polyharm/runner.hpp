#pragma once

#include "polyharm/config.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace polyharm::runner {

enum ExitCode { kOk = 0, kConfigError = 2, kNumericalFailure = 3 };

struct RunOptions {
    /// Replaces run.output from the config when non-empty.
    std::string output_dir;
    bool quiet = false;
};

struct RunResult {
    int exit_code = kOk;
    std::vector<std::string> artifacts;
    std::string message;
};

const std::vector<std::string>& subcommands();

/// Runs one subcommand; never throws polyharm::Error, which is mapped to an exit code.
RunResult run(const std::string& subcommand, const ExperimentConfig& config, const RunOptions& options,
              std::ostream& out);

/// Exit code for a module error.
int exit_code_for(ErrorCode code);

}  // namespace polyharm::runner
