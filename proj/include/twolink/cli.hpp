#pragma once

#include <iosfwd>

namespace twolink {

// Exit codes: 0 success, 1 a computed check failed, 2 usage or parse error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace twolink
