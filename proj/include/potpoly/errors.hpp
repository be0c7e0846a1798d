#pragma once

#include <stdexcept>
#include <string>

namespace potpoly {

/// Base class for all library failures that map to CLI exit code 2.
struct VerificationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Failures of the integer-polynomial construction pipeline (exit code 3).
/// Carries the name of the stage that failed.
struct ConstructionFailed : std::runtime_error {
  explicit ConstructionFailed(const std::string& stage, const std::string& detail)
      : std::runtime_error("construction failed at stage '" + stage + "': " + detail),
        stage(stage) {}
  std::string stage;
};

/// Malformed inputs: bad JSON, bad flags, inconsistent domains (exit code 64).
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct EmptySetError : UsageError {
  EmptySetError() : UsageError("interval union is empty") {}
};

struct NotCompactError : UsageError {
  NotCompactError(const std::string& what) : UsageError(what) {}
};

struct InsufficientNodesError : UsageError {
  using UsageError::UsageError;
};

struct NotProbabilityError : UsageError {
  using UsageError::UsageError;
};

struct NotSquarefreeError : UsageError {
  using UsageError::UsageError;
};

struct DegreeError : UsageError {
  using UsageError::UsageError;
};

struct PruneInfeasibleError : UsageError {
  using UsageError::UsageError;
};

struct ParameterError : UsageError {
  using UsageError::UsageError;
};

struct SweetenerUndefinedError : UsageError {
  using UsageError::UsageError;
};

struct IterationLimitError : VerificationError {
  using VerificationError::VerificationError;
};

struct UnboundedError : VerificationError {
  using VerificationError::VerificationError;
};

struct InfeasibleError : VerificationError {
  using VerificationError::VerificationError;
};

struct TailUncertifiedError : VerificationError {
  using VerificationError::VerificationError;
};

struct RootEscapeError : VerificationError {
  using VerificationError::VerificationError;
};

struct ConstructionFailedError : VerificationError {
  using VerificationError::VerificationError;
};

}  // namespace potpoly
