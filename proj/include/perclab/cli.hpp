#pragma once

#include <iosfwd>

namespace perclab {

// Subcommands sample | profile | explore | wulff | flow | experiment.
// Returns 0 on success, 1 on a domain error, 2 on a configuration or usage error.
int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace perclab
