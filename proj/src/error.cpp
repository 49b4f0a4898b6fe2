#include "cfpp/error.hpp"

namespace cfpp {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::OddTotalDegree: return "OddTotalDegree";
    case ErrorCode::NonPositiveDegree: return "NonPositiveDegree";
    case ErrorCode::EmptySequence: return "EmptySequence";
    case ErrorCode::InvalidPmf: return "InvalidPmf";
    case ErrorCode::OddSetSize: return "OddSetSize";
    case ErrorCode::MaxAttemptsExceeded: return "MaxAttemptsExceeded";
    case ErrorCode::IdenticalSeeds: return "IdenticalSeeds";
    case ErrorCode::VertexOutOfRange: return "VertexOutOfRange";
    case ErrorCode::NoActiveHalfEdges: return "NoActiveHalfEdges";
    case ErrorCode::ExhaustedFreePool: return "ExhaustedFreePool";
    case ErrorCode::InvariantViolated: return "InvariantViolated";
    case ErrorCode::StepNotRecorded: return "StepNotRecorded";
    case ErrorCode::InsufficientGrowth: return "InsufficientGrowth";
    case ErrorCode::RangeNotCovered: return "RangeNotCovered";
    case ErrorCode::InsufficientSizes: return "InsufficientSizes";
    case ErrorCode::InstanceTooLarge: return "InstanceTooLarge";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Config: return "ConfigError";
    case ErrorCode::Io: return "IoError";
  }
  return "UnknownError";
}

}  // namespace cfpp
