#include "pssi/error.hpp"

namespace pssi {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::DecodeError: return "DecodeError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ConflictError: return "ConflictError";
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidK: return "InvalidK";
    case ErrorCode::EmptySegment: return "EmptySegment";
    case ErrorCode::BinMismatch: return "BinMismatch";
    case ErrorCode::MissingJointHistogram: return "MissingJointHistogram";
    case ErrorCode::SeedConflict: return "SeedConflict";
    case ErrorCode::EmptySeeds: return "EmptySeeds";
    case ErrorCode::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::SingleSegment: return "SingleSegment";
    case ErrorCode::DatasetLayoutError: return "DatasetLayoutError";
  }
  return "Unknown";
}

}  // namespace pssi
