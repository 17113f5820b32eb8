#pragma once

// Errors raised by the command-line layer and the exit-code contract.

#include <stdexcept>
#include <string>

namespace momlab::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInput = 1,
  kExitNonConvergence = 2,
  kExitProbe = 3,
};

/// Bad flags or flag values.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ExpressionError : public UsageError {
 public:
  using UsageError::UsageError;
};

/// Config file problem; the message carries the file name and line.
class ConfigError : public UsageError {
 public:
  using UsageError::UsageError;
};

/// A probe could not produce its result (exit 3).
class ProbeFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace momlab::cli
