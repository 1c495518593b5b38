#pragma once

#include <iosfwd>

namespace cpcapp {

/// Runs one `cpcapp` subcommand. Returns 0 on success, 1 on a usage error and
/// 2 on a data error; diagnostics go to err.
int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cpcapp
