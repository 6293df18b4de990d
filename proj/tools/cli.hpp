#pragma once

#include <iosfwd>

namespace blowup {

/// Command-line entry point; returns the process exit status.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace blowup
