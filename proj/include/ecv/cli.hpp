#pragma once

#include <ostream>

namespace ecv {

/// Entry point for the `ecv` tool: simulate | tune | surface | compare.
/// Returns the process exit code. Failures print one line
/// "error: <class>: <message>" to err.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace ecv
