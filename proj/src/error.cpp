#include "hitstat/error.hpp"

namespace hitstat {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::NonStochasticRow: return "NonStochasticRow";
    case ErrorCode::ReducibleChain: return "ReducibleChain";
    case ErrorCode::PeriodicChain: return "PeriodicChain";
    case ErrorCode::ZeroMassSymbol: return "ZeroMassSymbol";
    case ErrorCode::BadThetaRange: return "BadThetaRange";
    case ErrorCode::InvalidSymbol: return "InvalidSymbol";
    case ErrorCode::EmptyWord: return "EmptyWord";
    case ErrorCode::NonPositiveS: return "NonPositiveS";
    case ErrorCode::PowerIterationNoConvergence: return "PowerIterationNoConvergence";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::ZeroMeasureTarget: return "ZeroMeasureTarget";
    case ErrorCode::MixedLengths: return "MixedLengths";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::TailNotContracting: return "TailNotContracting";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::CensoringExceeded: return "CensoringExceeded";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::SequenceTooShort: return "SequenceTooShort";
  }
  return "Unknown";
}

bool is_validation_error(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidSpec:
    case ErrorCode::NonStochasticRow:
    case ErrorCode::ReducibleChain:
    case ErrorCode::PeriodicChain:
    case ErrorCode::ZeroMassSymbol:
    case ErrorCode::BadThetaRange:
    case ErrorCode::InvalidSymbol:
    case ErrorCode::EmptyWord:
    case ErrorCode::NonPositiveS:
    case ErrorCode::ZeroMeasureTarget:
    case ErrorCode::MixedLengths:
    case ErrorCode::EmptySet:
    case ErrorCode::InvalidArgument:
      return true;
    default:
      return false;
  }
}

}  // namespace hitstat
