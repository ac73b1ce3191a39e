#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gmpforge {

// Full command-line driver; args excludes the program name. Returns the
// process exit code: 0 on success, 2 for unparsable command lines, 3 for
// invalid configuration, 4 for runtime and artifact failures.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

} // namespace gmpforge
