#pragma once

#include "intent_cbr/error.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace intent_cbr::cli {

/// Stable process exit codes.
enum ExitCode : int {
    kOk = 0,
    kIoFailure = 1,
    kValidation = 2,
    kEmptyRepository = 3,
    kAnalysisFailure = 4,
};

int exit_code_for(ErrorCode code) noexcept;

/// Runs one command line (without the program name). Data goes to `out`,
/// prompts and diagnostics to `err`; `in` feeds the interactive revise prompt.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace intent_cbr::cli
