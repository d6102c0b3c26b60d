#pragma once

#include <iosfwd>

namespace globest {

enum ExitCode { exit_ok = 0, exit_config = 1, exit_solver = 2, exit_certification = 3 };

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace globest
