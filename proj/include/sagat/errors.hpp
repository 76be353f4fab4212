#pragma once

#include <stdexcept>
#include <string>

namespace sagat {

// Exit codes used by the CLI. Library code throws; the CLI maps.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitValidation = 3,
  kExitRuntime = 4,
};

// Invariant or input-contract violation (bad config, malformed file, ...).
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// An object does not afford the requested task.
class NotAffordedError : public std::runtime_error {
 public:
  explicit NotAffordedError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sagat
