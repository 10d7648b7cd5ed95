#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tanred {

/// Failure categories raised by the library. The CLI reports the name of the
/// category alongside the message and maps it to an exit code.
enum class ErrorKind {
  DimensionMismatch,
  SingularResolvent,
  InvariantViolation,
  IllConditionedLyapunov,
  NonzeroFeedthrough,
  RankDeficient,
  DuplicateFrequency,
  IndexOutOfRange,
  GramianRankCollapse,
  EmptyGrid,
  RankExhausted,
  UnstableSystem,
  InvalidArgument,
  ParseError,
  IoError,
  UsageError,
};

std::string_view error_kind_name(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }
  std::string_view name() const noexcept { return error_kind_name(kind_); }

 private:
  ErrorKind kind_;
};

}  // namespace tanred
