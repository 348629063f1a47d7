#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tvflow::cli {

// The tvflow command line; args excludes the program name. Returns the exit
// code: 0 success, 1 numerical failure, 2 usage or schema error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tvflow::cli
