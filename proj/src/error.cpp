#include "nbw/error.hpp"

namespace nbw {

const char *error_name(ErrorKind kind) {
  switch (kind) {
  case ErrorKind::BarOfInfiniteSeries:
    return "BarOfInfiniteSeries";
  case ErrorKind::NotInvertible:
    return "NotInvertible";
  case ErrorKind::InvalidWeights:
    return "InvalidWeights";
  case ErrorKind::ParityMismatch:
    return "ParityMismatch";
  case ErrorKind::WeightMismatch:
    return "WeightMismatch";
  case ErrorKind::NonTerminating:
    return "NonTerminating";
  case ErrorKind::MalformedRaw:
    return "MalformedRaw";
  case ErrorKind::PositionMismatch:
    return "PositionMismatch";
  case ErrorKind::TransitivityViolation:
    return "TransitivityViolation";
  case ErrorKind::PreconditionViolated:
    return "PreconditionViolated";
  case ErrorKind::OutsideHalfAlgebra:
    return "OutsideHalfAlgebra";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string &message)
    : std::runtime_error(std::string(error_name(kind)) + ": " + message),
      kind_(kind) {}

} // namespace nbw
