#pragma once

#include <string>
#include <vector>

namespace mg2v::cli {

// Full CLI entry point; args excludes the program name. Returns the process
// exit code: 0 success, 1 runtime failure, 2 usage error.
int run(const std::vector<std::string>& args);

}  // namespace mg2v::cli
