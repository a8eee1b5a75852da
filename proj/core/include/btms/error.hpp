#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace btms {

enum class ErrorCode {
  EmptyCloud,
  InvalidConfig,
  InvalidNodeId,
  NearVerticalPlane,
  TooFewPoints,
  DegenerateCovariance,
  MissingPlane,
  NoTerrainNodes,
  NonpositiveRadius,
  EmptyNeighborhood,
  VerticalDisplacement,
  NoResolvedCorners,
  DegenerateCorners,
  MalformedFile,
  IoError,
  CountMismatch,
  ParseError,
  SequenceLengthMismatch,
  LengthMismatch,
};

std::string_view to_string(ErrorCode code) noexcept;

// Coarse grouping used by the CLI to pick an exit status.
enum class ErrorCategory { Input, DataConsistency, Internal };

ErrorCategory category_of(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Rethrows `e` with a "stage: " prefix on the message, keeping the code.
[[noreturn]] void rethrow_with_stage(const Error& e, std::string_view stage);

}  // namespace btms
