#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace crnzero::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kFailed = 1;
inline constexpr int kUsage = 2;

/// Runs one command. `args` excludes the program name. Reports go to `out`,
/// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// The network file grammar shown in --help.
const char* grammar_text();

}  // namespace crnzero::cli
