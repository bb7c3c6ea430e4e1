#pragma once

#include <string>
#include <vector>

namespace sdr::cli {

/// Exit codes: 0 success, 1 usage error, 2 data error, 3 training error,
/// 4 theory-check violation.
int runCli(const std::vector<std::string>& args);

/// Parses "start:end:step" ranges and comma-separated lists of numbers.
std::vector<double> parseGrid(const std::string& text);

}  // namespace sdr::cli
