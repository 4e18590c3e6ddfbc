#pragma once

#include <iosfwd>

namespace nichecma {

/// Entry point of the `nichecma` tool: subcommands run, suite, gen and report.
/// Returns 0 on success, 2 on usage errors and 1 on runtime failures.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace nichecma
