#include "mfi/errors.hpp"

namespace mfi {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NegativeOffDiagonal: return "NegativeOffDiagonal";
    case ErrorCode::RowSumNonzero: return "RowSumNonzero";
    case ErrorCode::NotIrreducible: return "NotIrreducible";
    case ErrorCode::NumericalRankFailure: return "NumericalRankFailure";
    case ErrorCode::NonPositiveValue: return "NonPositiveValue";
    case ErrorCode::LambdaOutOfRange: return "LambdaOutOfRange";
    case ErrorCode::DeltaTooLarge: return "DeltaTooLarge";
    case ErrorCode::UnderflowGuard: return "UnderflowGuard";
    case ErrorCode::EigensolveFailure: return "EigensolveFailure";
    case ErrorCode::OptimizerDidNotConverge: return "OptimizerDidNotConverge";
    case ErrorCode::SizeOverflow: return "SizeOverflow";
    case ErrorCode::RestrictionNotIrreducible: return "RestrictionNotIrreducible";
    case ErrorCode::EmptyLevelSet: return "EmptyLevelSet";
    case ErrorCode::ZeroClusterMass: return "ZeroClusterMass";
    case ErrorCode::SearchSpaceTooLarge: return "SearchSpaceTooLarge";
    case ErrorCode::StepSizeUnderflow: return "StepSizeUnderflow";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "UnknownError";
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::IoError:
    case ErrorCode::ParseError:
      return 3;
    case ErrorCode::OptimizerDidNotConverge:
      return 4;
    default:
      return 2;
  }
}

}  // namespace mfi
