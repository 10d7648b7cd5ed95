#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tanred {

/// Exit codes of run_cli.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitNumeric = 4;

/// `tanred reduce|sweep --model PATH [flags]`. Writes <out>.trace.csv,
/// <out>.model.txt (or <out>.model.{A,B,C,D}.mtx), <out>.compare.csv and
/// <out>.report.json-lines. Never throws.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tanred
