#pragma once

#include <map>
#include <string>
#include <vector>

#include "tanred/reducer.hpp"

namespace tanred {

/// Everything a CLI run produced, in a form that round-trips through JSON lines.
struct RunReport {
  std::string command;
  /// Echo of the effective configuration, flag name -> printed value.
  std::map<std::string, std::string> config;
  double gamma0 = 0.0;
  std::string stop_reason;
  std::string failure;
  std::vector<TraceRow> trace;
  StateSpace model;
  std::vector<CompareRow> compare;
  double total_seconds = 0.0;

  bool operator==(const RunReport& other) const;
};

/// One JSON object per line, each tagged with "kind": header, trace, model,
/// compare, timing. Non-finite numbers are written as strings ("nan", "inf").
std::string to_json_lines(const RunReport& report);
/// Throws ParseError with the offending line number.
RunReport from_json_lines(const std::string& text);

/// Header iter,omega,r_min,r_max,order,gamma,error_norm,stable_flag,seconds.
std::string trace_csv(const std::vector<TraceRow>& rows);
/// Header order,tangential_order,tangential_error,balanced_error.
std::string compare_csv(const std::vector<CompareRow>& rows);

}  // namespace tanred
