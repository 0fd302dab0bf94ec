#pragma once

#include <iostream>
#include <string>
#include <vector>

namespace carinfo {

/// Exit codes: 0 success, 1 validation error (bad flags or inputs), 2 runtime
/// or fit failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr);
int run_cli(int argc, char** argv);

}  // namespace carinfo
