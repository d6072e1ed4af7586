#pragma once

// Executes one configured experiment, writes its data files and returns the
// one-line summary printed by the CLI.

#include <exception>
#include <string>
#include <vector>

#include "nambu/config.hpp"

namespace nambu {

struct RunResult {
  std::string summary;             ///< "experiment key=value ..." with 17 digits
  std::vector<std::string> files;  ///< paths written, in order
};

RunResult run(const RunConfig& cfg);

/// 2 for configuration and domain errors, 3 for numerical failures, 1 otherwise.
int exit_code_for(const std::exception& e);

/// {"error": kind, "message": ..., "exit_code": n} on one line.
std::string error_json(const std::exception& e);

}  // namespace nambu
