#pragma once

#include <string>
#include <vector>

namespace ruaf::cli {

// Full command-line entry point (subcommands: analyze, align, compare,
// simulate). Returns the process exit code: 0 success, 1 validation error,
// 2 usage error.
int run(const std::vector<std::string>& args);

}  // namespace ruaf::cli
