// Command-line front end: composable subcommands over files, plus the
// pipeline runner that chains them. Exit codes: 0 success, 1 usage/IO/parse
// error, 2 validation errors found, 3 solver error.
#pragma once

#include <string>
#include <vector>

namespace twingraph::cli {

inline constexpr const char* kVersion = "twingraph 0.1.0";

/// Runs one invocation; args exclude the program name.
int run(std::vector<std::string> args);

}  // namespace twingraph::cli
