#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "warpft/errors.hpp"

namespace warpft {

/// 0 ok, 2 config, 3 shape, 4 format, 5 capability, 1 anything else.
int exit_code_for(ErrorKind kind);

/// Runs one command line (program name excluded).  Never throws.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace warpft
