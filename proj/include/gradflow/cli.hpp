#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gradflow::cli {

inline constexpr const char* kReportSchemaVersion = "1.0";

/// Exit codes of the command-line tool.
enum ExitCode : int {
    kOk = 0,
    kParseError = 2,
    kDimensionError = 3,
    kSynthesisPrecondition = 4,
    kNumericFailure = 5,
    kInvalidGenerator = 6,
    kDegenerateChain = 7,
    kNotReversible = 8,
};

/// Runs the tool with args[0] as program name. Reports go to `out` as JSON,
/// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gradflow::cli
