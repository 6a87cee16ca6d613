#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dtf {

/// Machine-readable failure taxonomy shared by the library and the CLI.
enum class ErrorCode {
  DivisionByZero,
  MixedOperandError,
  ZeroOperator,
  VanishingInvariant,
  NotInKernel,
  NoSolution,
  SourceTargetMismatch,
  DegenerateWronskian,
  NotCertified,
  NotVerified,
  WitnessInvalid,
  NonzeroRemainder,
  FactorizableOperator,
  ChainTooShort,
  StuckNoSplit,
  InvalidDeclaration,
  SyntaxError,
  UnboundName,
  TypeError,
  CapacityExceeded,
};

std::string_view to_string(ErrorCode code);

/// True for failures that are mathematical outcomes rather than misuse.
bool is_mathematical(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string certificate = {})
      : std::runtime_error(message), code_(code), certificate_(std::move(certificate)) {}

  ErrorCode code() const noexcept { return code_; }

  // Printed witness of the failure (a nonzero residual or remainder), may be empty.
  const std::string& certificate() const noexcept { return certificate_; }

 private:
  ErrorCode code_;
  std::string certificate_;
};

}  // namespace dtf
