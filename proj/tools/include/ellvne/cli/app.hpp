#pragma once

/// \file app.hpp
/// Entry point of the `ellvne` command-line tool.

#include <iosfwd>
#include <string>
#include <vector>

namespace ellvne::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitVerificationFailed = 1,
  kExitUsage = 2,
  kExitNumerical = 3,
};

/// args excludes the program name. Output files named by --output are written
/// directly; everything else goes to `out` / `err`.
int run_app(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Joins "--flag value" into "--flag=value" when value starts with '-' and
/// parses as a number or a start:end range, so negative values survive option
/// parsing.
std::vector<std::string> normalize_negative_values(const std::vector<std::string>& args);

/// "a:b" -> (a, b). Throws std::invalid_argument on malformed text.
std::pair<double, double> parse_time_range(const std::string& text);

}  // namespace ellvne::cli
