#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace polysum {

// Command dispatch used by the polysum binary and the CLI tests.
// Exit codes: 0 pass, 1 semantic refutation, 2 input error.
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace polysum
