#pragma once

#include <iosfwd>

namespace potts::cli {

/// Runs one command line. Exit codes: 0 success, 1 validation error, 2 runtime error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace potts::cli
