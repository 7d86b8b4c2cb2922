#pragma once

#include <ostream>

namespace hybridflow {

/// Process exit codes.
enum ExitCode : int {
	exit_success = 0,
	/// A benchmark ran but at least one metric is out of tolerance.
	exit_failed = 1,
	exit_usage = 2,
	exit_numerical = 3,
};

/// Entry point of the `hybridflow` executable, with injectable streams.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace hybridflow
