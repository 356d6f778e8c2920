#pragma once

namespace stgam {

// Subcommands: synth | entropy | features | train | predict | evaluate.
// Exit codes: 0 success, 1 usage error, 2 data/validation error,
// 3 numerical failure. Diagnostics go to stderr, data to files/stdout.
int run(int argc, const char* const* argv);

}  // namespace stgam
