#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace licremedy::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 1,
  kNotFound = 2,
  kNoSolution = 3,
  kTimeout = 4,
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// Process environment lookup.
std::optional<std::string> process_env(const std::string& name);

/// Runs one command. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const EnvLookup& env = process_env);

}  // namespace licremedy::cli
