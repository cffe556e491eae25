#pragma once

#include <ostream>

namespace chainlab::cli {

enum ExitCode : int {
  kSuccess = 0,
  kInvalidInput = 1,
  kVerificationFailed = 2,
};

/// Parses argv and runs one subcommand. Data documents go to --out when given,
/// otherwise to `out`; diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace chainlab::cli
