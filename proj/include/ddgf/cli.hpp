#pragma once

namespace ddgf {

// Exit codes: 0 success, 1 user error (bad config, paths, input data),
// 2 internal invariant violation.
int run_cli(int argc, const char* const* argv);

}  // namespace ddgf
