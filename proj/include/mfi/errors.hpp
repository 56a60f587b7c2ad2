#pragma once

#include <stdexcept>
#include <string>

namespace mfi {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  NegativeOffDiagonal,
  RowSumNonzero,
  NotIrreducible,
  NumericalRankFailure,
  NonPositiveValue,
  LambdaOutOfRange,
  DeltaTooLarge,
  UnderflowGuard,
  EigensolveFailure,
  OptimizerDidNotConverge,
  SizeOverflow,
  RestrictionNotIrreducible,
  EmptyLevelSet,
  ZeroClusterMass,
  SearchSpaceTooLarge,
  StepSizeUnderflow,
  IoError,
  ParseError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Exit-code category used by the CLI: 2 domain, 3 I/O, 4 optimizer.
int exit_code_for(ErrorCode code);

}  // namespace mfi
