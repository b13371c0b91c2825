#pragma once

#include <iosfwd>

namespace delenox::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kAborted = 3,
  kMissingReportData = 4,
};

/// Entry point for the `delenox` tool. Subcommands: render, bootstrap,
/// explore, train, experiment, diversity, gallery, plot.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace delenox::cli
