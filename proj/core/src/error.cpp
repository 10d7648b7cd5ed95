#include "tanred/error.hpp"

namespace tanred {

std::string_view error_kind_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::SingularResolvent: return "SingularResolvent";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
    case ErrorKind::IllConditionedLyapunov: return "IllConditionedLyapunov";
    case ErrorKind::NonzeroFeedthrough: return "NonzeroFeedthrough";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::DuplicateFrequency: return "DuplicateFrequency";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::GramianRankCollapse: return "GramianRankCollapse";
    case ErrorKind::EmptyGrid: return "EmptyGrid";
    case ErrorKind::RankExhausted: return "RankExhausted";
    case ErrorKind::UnstableSystem: return "UnstableSystem";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::UsageError: return "UsageError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(message), kind_(kind) {}

}  // namespace tanred
