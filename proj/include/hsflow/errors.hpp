#pragma once

#include <stdexcept>
#include <string>

namespace hsflow {

/// Bad construction parameter (ordering, sign, size).
struct InvalidParameter : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Evaluation point outside the admissible set.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// A user-supplied function returned NaN or Inf.
struct EvaluationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Sampling grid too coarse for the requested truncation.
struct ResolutionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A compatibility / solvability identity failed beyond tolerance.
struct SolvabilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Linear solve did not reach the requested residual.
struct SolverConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Free-boundary height reached zero.
struct GeometryCollapseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Two objects that must share (eps, t) do not.
struct PairingError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Not enough samples for a fit.
struct InsufficientData : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace hsflow
