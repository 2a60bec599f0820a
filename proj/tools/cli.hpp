#pragma once

namespace bmikit::cli {

// Parses argv and runs one subcommand. Returns 0 on success, 1 on usage
// errors, 2 on data or validation errors. Diagnostics go to stderr.
int run(int argc, const char* const* argv);

}  // namespace bmikit::cli
