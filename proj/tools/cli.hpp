#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace steeplab::cli {

/// Runs one command line (args[0] is the program name). Exit codes: 0 ok,
/// 1 configuration or usage error, 2 numerical failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace steeplab::cli
