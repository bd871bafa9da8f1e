#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pointproc::cli {

// Runs one `pointproc` invocation. `args` excludes the program name.
// Returns the process exit code: 0 on success, 1 on runtime failure, 2 on
// usage errors. Data files go to --out; warnings and errors go to `diag`.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& diag);

}  // namespace pointproc::cli
