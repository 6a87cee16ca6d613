#include "dtf/error.hpp"

namespace dtf {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::MixedOperandError: return "MixedOperandError";
    case ErrorCode::ZeroOperator: return "ZeroOperator";
    case ErrorCode::VanishingInvariant: return "VanishingInvariant";
    case ErrorCode::NotInKernel: return "NotInKernel";
    case ErrorCode::NoSolution: return "NoSolution";
    case ErrorCode::SourceTargetMismatch: return "SourceTargetMismatch";
    case ErrorCode::DegenerateWronskian: return "DegenerateWronskian";
    case ErrorCode::NotCertified: return "NotCertified";
    case ErrorCode::NotVerified: return "NotVerified";
    case ErrorCode::WitnessInvalid: return "WitnessInvalid";
    case ErrorCode::NonzeroRemainder: return "NonzeroRemainder";
    case ErrorCode::FactorizableOperator: return "FactorizableOperator";
    case ErrorCode::ChainTooShort: return "ChainTooShort";
    case ErrorCode::StuckNoSplit: return "StuckNoSplit";
    case ErrorCode::InvalidDeclaration: return "InvalidDeclaration";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnboundName: return "UnboundName";
    case ErrorCode::TypeError: return "TypeError";
    case ErrorCode::CapacityExceeded: return "CapacityExceeded";
  }
  return "Unknown";
}

bool is_mathematical(ErrorCode code) {
  switch (code) {
    case ErrorCode::SyntaxError:
    case ErrorCode::UnboundName:
    case ErrorCode::TypeError:
    case ErrorCode::InvalidDeclaration:
    case ErrorCode::CapacityExceeded:
    case ErrorCode::MixedOperandError:
      return false;
    default:
      return true;
  }
}

}  // namespace dtf
