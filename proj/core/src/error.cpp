#include "btms/error.hpp"

namespace btms {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptyCloud: return "EmptyCloud";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidNodeId: return "InvalidNodeId";
    case ErrorCode::NearVerticalPlane: return "NearVerticalPlane";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::DegenerateCovariance: return "DegenerateCovariance";
    case ErrorCode::MissingPlane: return "MissingPlane";
    case ErrorCode::NoTerrainNodes: return "NoTerrainNodes";
    case ErrorCode::NonpositiveRadius: return "NonpositiveRadius";
    case ErrorCode::EmptyNeighborhood: return "EmptyNeighborhood";
    case ErrorCode::VerticalDisplacement: return "VerticalDisplacement";
    case ErrorCode::NoResolvedCorners: return "NoResolvedCorners";
    case ErrorCode::DegenerateCorners: return "DegenerateCorners";
    case ErrorCode::MalformedFile: return "MalformedFile";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::CountMismatch: return "CountMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SequenceLengthMismatch: return "SequenceLengthMismatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
  }
  return "Unknown";
}

ErrorCategory category_of(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptyCloud:
    case ErrorCode::InvalidConfig:
    case ErrorCode::MalformedFile:
    case ErrorCode::IoError:
    case ErrorCode::ParseError:
      return ErrorCategory::Input;
    case ErrorCode::CountMismatch:
    case ErrorCode::LengthMismatch:
    case ErrorCode::SequenceLengthMismatch:
      return ErrorCategory::DataConsistency;
    default:
      return ErrorCategory::Internal;
  }
}

void rethrow_with_stage(const Error& e, std::string_view stage) {
  throw Error(e.code(), std::string(stage) + ": " + e.what());
}

}  // namespace btms
