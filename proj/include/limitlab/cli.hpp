#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace limitlab {

// Exit codes: 0 success, 1 usage or config error, 2 verification disagreement
// under `learn --expect-converge`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace limitlab
