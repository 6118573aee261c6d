#pragma once

#include <stdexcept>
#include <string>

namespace nbw {

enum class ErrorKind {
  BarOfInfiniteSeries,
  NotInvertible,
  InvalidWeights,
  ParityMismatch,
  WeightMismatch,
  NonTerminating,
  MalformedRaw,
  PositionMismatch,
  TransitivityViolation,
  PreconditionViolated,
  OutsideHalfAlgebra,
};

const char *error_name(ErrorKind kind);

/**
 * Error raised by every workbench operation; `kind()` carries the
 * machine-readable category, `what()` a human-readable message.
 */
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string &message);
  ErrorKind kind() const { return kind_; }

private:
  ErrorKind kind_;
};

} // namespace nbw
