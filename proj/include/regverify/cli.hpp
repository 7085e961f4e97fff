#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace regverify::cli {

/// Exit codes shared by every verb.
enum Exit : int {
  kPositive = 0,
  kNegative = 1,
  kUnknown = 2,
  kCapExceeded = 3,
  kUsage = 64,
  kDataError = 65,
  kNoInput = 66,
};

/// Runs one command; `args` excludes the program name. Verdict JSON and
/// files listings go to `out`, human-readable summaries and errors to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace regverify::cli
