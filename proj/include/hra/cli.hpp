#pragma once

namespace hra {

/// Entry point of the command-line tool; returns the process exit status.
/// Exit codes: 0 success, 2 config parse error, 3 invalid configuration,
/// 4 I/O failure, 5 training divergence.
int cli_main(int argc, const char* const* argv);

} // namespace hra
