#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace undulate {

enum class ErrorCode {
  ZeroLengthEdge,
  InvalidLength,
  InvalidShape,
  NonPositiveWeight,
  ShapeMismatch,
  InvalidAnisotropy,
  InvalidWeight,
  NoConvergence,
  DegenerateJacobian,
  InconsistentMarkerCount,
  InvalidMocap,
  EmptyCurve,
  InvalidBounds,
  NonFiniteLoss,
  NonPositiveDisplacement,
  DimensionMismatch,
  EmptyInput,
  NonPositiveInput,
  NonPositiveDuration,
  ParseError,
};

inline const char* toString(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroLengthEdge: return "ZeroLengthEdge";
    case ErrorCode::InvalidLength: return "InvalidLength";
    case ErrorCode::InvalidShape: return "InvalidShape";
    case ErrorCode::NonPositiveWeight: return "NonPositiveWeight";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::InvalidAnisotropy: return "InvalidAnisotropy";
    case ErrorCode::InvalidWeight: return "InvalidWeight";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::DegenerateJacobian: return "DegenerateJacobian";
    case ErrorCode::InconsistentMarkerCount: return "InconsistentMarkerCount";
    case ErrorCode::InvalidMocap: return "InvalidMocap";
    case ErrorCode::EmptyCurve: return "EmptyCurve";
    case ErrorCode::InvalidBounds: return "InvalidBounds";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::NonPositiveDisplacement: return "NonPositiveDisplacement";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::NonPositiveInput: return "NonPositiveInput";
    case ErrorCode::NonPositiveDuration: return "NonPositiveDuration";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Base exception for every failure raised by the library. The code lets
/// callers branch on the failure kind without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(toString(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by the per-step rigid positioning solve. `timestep` is -1 when the
/// failure happens outside of a trajectory integration.
class SolverError : public Error {
 public:
  SolverError(ErrorCode code, const std::string& what, Eigen::Vector3d residual,
              int iterations, long timestep = -1)
      : Error(code, what + " (iterations " + std::to_string(iterations) +
                        ", |residual| " + std::to_string(residual.norm()) +
                        (timestep >= 0 ? ", timestep " + std::to_string(timestep) : "") +
                        ")"),
        residual_(residual),
        iterations_(iterations),
        timestep_(timestep) {}

  const Eigen::Vector3d& residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }
  long timestep() const noexcept { return timestep_; }

  SolverError atTimestep(long t) const {
    return SolverError(code(), "step solve failed", residual_, iterations_, t);
  }

 private:
  Eigen::Vector3d residual_;
  int iterations_;
  long timestep_;
};

}  // namespace undulate
