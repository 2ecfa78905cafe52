#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qmarkov {

enum class ErrorKind {
  // input validation
  DimensionMismatch,
  NotHermitian,
  NotPsd,
  NotProjection,
  NotUnital,
  NotCompletelyPositive,
  NotAState,
  EffectsDontSumToIdentity,
  NotStochastic,
  NegativeInput,
  NotUnitVector,
  InvalidArgument,
  // precondition of an analysis
  NotSuperharmonic,
  NotSubharmonic,
  NotRecurrent,
  NotSummable,
  NotPotentialForPower,
  NotIdempotent,
  RangeNotCommutative,
  NotInCompressedAlgebra,
  NotHolevoProvenance,
  InvalidComponents,
  // numerical breakdown
  NonSemisimpleUnitEigenvalue,
  InvariantViolation,
  CrossCheckMismatch,
  NonConvergence,
  // document handling
  ParseError,
};

std::string_view to_string(ErrorKind kind);

/// Whether an error signals numerical breakdown rather than bad input.
bool is_breakdown(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace qmarkov
