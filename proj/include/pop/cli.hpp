#pragma once

namespace pop::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kConfigError = 2,
  kPricingError = 3,
  kOutOfDomain = 4,
};

/// Entry point of the `pop` command line tool.
int run(int argc, char** argv);

}  // namespace pop::cli
