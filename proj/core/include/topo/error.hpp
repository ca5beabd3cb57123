#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace topo {

enum class ErrorCode {
  InvalidArgument,
  ShapeMismatch,
  NonFiniteInput,
  SingularSystem,
  BisectionFailure,
  InsufficientScenarios,
  UnknownCombo,
  BadMagic,
  VersionMismatch,
  TruncatedFile,
  ChecksumMismatch,
  DegenerateGroundTruth,
  IdMismatch,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-checkable error kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace topo
