#pragma once

#include <string>
#include <vector>

namespace driftstream::cli {

// Exit codes: 0 success, 1 usage/config error, 2 data error, 3 internal
// invariant violation.
int cli_main(int argc, const char* const* argv);

// Same entry point for in-process callers; args exclude the program name.
int run(const std::vector<std::string>& args);

}  // namespace driftstream::cli
