#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace shiftsparse::cli {

enum ExitCode : int {
  kOk = 0,
  kRuntimeError = 1,
  kConfigError = 2,
  kThresholdFailure = 3,
};

// Runs one command line (args excludes the program name). Human-readable
// output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// "a:b:step" (inclusive) or "a,b,c".
std::vector<double> parse_lambda_list(const std::string& text);

}  // namespace shiftsparse::cli
