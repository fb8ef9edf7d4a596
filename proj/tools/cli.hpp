#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace refac {

/// Runs the `refac` command line. Refactored source and reports go to
/// `out`, diagnostics and traces to `err`. Returns the process exit code.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace refac
