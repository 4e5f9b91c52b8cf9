#pragma once

namespace wbary {

/// Entry point for the wbary binary. Exit codes: 0 success, 2 parse error,
/// 3 numeric failure, 4 invalid configuration.
int run_cli(int argc, const char* const* argv);

} // namespace wbary
