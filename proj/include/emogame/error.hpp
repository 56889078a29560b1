#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace emogame {

enum class ErrorCode {
  IllegalMove,
  InvalidSplit,
  HistoryMismatch,
  MissingTemplate,
  UnboundPlaceholder,
  UnparseableMove,
  UnparseableSplit,
  UnparseableDecision,
  TransportError,
  AuthError,
  ReplayExhausted,
  ReplayMismatch,
  PolicyGap,
  TooManyRounds,
  WrongGameKind,
  ConfigError,
  UnknownOverride,
  GoldenMismatch,
  ReplayDivergence,
  EmptyGroup,
  IoError,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries a typed code so callers (and
// the CLI's one-line error output) can dispatch without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace emogame
