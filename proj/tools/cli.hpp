#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace elemodds::cli {

/// Exit codes: 0 success, 1 validation failure, 2 usage or input error,
/// 3 internal failure.
enum ExitCode : int { kOk = 0, kValidationFailed = 1, kUsage = 2, kInternal = 3 };

/// Runs the command line `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct ValidateOptions {
  bool quick = false;
  std::uint64_t seed = 1;
  int threads = 1;
  /// Multiplies h* on the closed-form side of every check; anything but 1
  /// must make validation fail.
  double perturb_h_star = 1;
};

struct CheckOutcome {
  std::string name;
  bool passed;
  std::string detail;
};

std::vector<CheckOutcome> run_validation(const ValidateOptions& options);

}  // namespace elemodds::cli
