#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hitstat {

enum class ErrorCode {
  InvalidSpec,
  NonStochasticRow,
  ReducibleChain,
  PeriodicChain,
  ZeroMassSymbol,
  BadThetaRange,
  InvalidSymbol,
  EmptyWord,
  NonPositiveS,
  PowerIterationNoConvergence,
  BudgetExceeded,
  ZeroMeasureTarget,
  MixedLengths,
  EmptySet,
  InvalidArgument,
  TailNotContracting,
  GridTooCoarse,
  CensoringExceeded,
  EmptyInput,
  IoFailure,
  SequenceTooShort,
};

std::string_view to_string(ErrorCode code) noexcept;

/// True for codes that describe bad input (a malformed model, word or
/// parameter) rather than a failure while computing.
bool is_validation_error(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hitstat
