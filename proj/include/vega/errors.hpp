#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vega {

/// Machine-readable failure classes. Every exception thrown by the library
/// carries one of these so the CLI can report it as a structured entry.
enum class ErrorCode {
  InvalidArgument,
  InvalidPotential,
  DivisionByZero,
  PoleAtPoint,
  NotADarbouxPoint,
  ZeroMultiplier,
  NotDiagonalizable,
  IndexOutOfRange,
  AlphaEqualsBeta,
  LinearPartMismatch,
  NonResonanceNotEstablished,
  RegimeMismatch,
  BranchPoint,
  InvalidOrder,
  SingularityTooClose,
  StepCountTooSmall,
  ParseError,
};

constexpr std::string_view to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidPotential: return "InvalidPotential";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::PoleAtPoint: return "PoleAtPoint";
    case ErrorCode::NotADarbouxPoint: return "NotADarbouxPoint";
    case ErrorCode::ZeroMultiplier: return "ZeroMultiplier";
    case ErrorCode::NotDiagonalizable: return "NotDiagonalizable";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::AlphaEqualsBeta: return "AlphaEqualsBeta";
    case ErrorCode::LinearPartMismatch: return "LinearPartMismatch";
    case ErrorCode::NonResonanceNotEstablished: return "NonResonanceNotEstablished";
    case ErrorCode::RegimeMismatch: return "RegimeMismatch";
    case ErrorCode::BranchPoint: return "BranchPoint";
    case ErrorCode::InvalidOrder: return "InvalidOrder";
    case ErrorCode::SingularityTooClose: return "SingularityTooClose";
    case ErrorCode::StepCountTooSmall: return "StepCountTooSmall";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace vega
