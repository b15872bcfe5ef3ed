#pragma once

#include <iosfwd>

namespace osmon::app {

// Entry point of the osmon command line. Exit codes: 0 success, 2 input
// error, 3 domain error (unreachable targets, degenerate configurations).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace osmon::app
