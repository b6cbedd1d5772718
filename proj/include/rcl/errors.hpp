#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rcl {

// Invalid arguments: wrong degrees, index sums, empty inputs.
struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// The projection center or the branch locus is not in general position.
// Callers draw a fresh pencil and retry.
struct PencilDegenerateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PathTooCloseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StepUnderflowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Sheet gluing produced something that is not a closed 2-manifold.
struct LiftInconsistentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularCurveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StructuralError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AssemblyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConvergenceError : std::runtime_error {
  ConvergenceError(const std::string& what, std::vector<double> best_residuals)
      : std::runtime_error(what), best_residuals(std::move(best_residuals)) {}
  std::vector<double> best_residuals;
};

struct NoCutError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace rcl
