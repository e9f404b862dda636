#pragma once

namespace provq {

// Entry point of the provq tool. Returns the process exit code:
// 0 success, 2 configuration/usage error, 3 runtime failure.
int run_cli(int argc, const char* const* argv);

}  // namespace provq
