#pragma once

#include <string>
#include <vector>

namespace wuigraph {

/// Runs one command line (argv[0] included). Returns 0 on success, 1 for a
/// validation error and 2 for a runtime error; messages go to stderr.
int run_cli(const std::vector<std::string>& args);

}  // namespace wuigraph
