#pragma once

#include <filesystem>
#include <iosfwd>

#include "dpp/config.hpp"
#include "dpp/report.hpp"

namespace dpp {

enum ExitCode : int { kExitPass = 0, kExitError = 1, kExitCheckFailed = 2 };

struct RunOptions {
  std::filesystem::path out_dir;
  unsigned threads = 1;
  /// Progress lines; null for silence.
  std::ostream* log = nullptr;
};

/// Runs the configured pipeline and returns its report; artifacts other than
/// the report are written into `options.out_dir` and listed in the report.
Report execute(const RunConfig& config, const RunOptions& options);

/// execute() plus report.json and the exit-code contract: 0 when every check
/// passes, 2 when one fails, 1 on error (partial artifacts are removed).
int run(const RunConfig& config, const RunOptions& options, std::ostream& err);

}  // namespace dpp
