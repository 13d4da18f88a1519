#include "condsweep/errors.hpp"

namespace condsweep {

std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::AmbiguousSlerp: return "AmbiguousSlerp";
    case ErrorCode::DegenerateMesh: return "DegenerateMesh";
    case ErrorCode::DegenerateCloud: return "DegenerateCloud";
    case ErrorCode::EmptyCloud: return "EmptyCloud";
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::BackendUnavailable: return "BackendUnavailable";
    case ErrorCode::BackendError: return "BackendError";
    case ErrorCode::ProtocolError: return "ProtocolError";
    case ErrorCode::RequiresWeld: return "RequiresWeld";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::DegenerateMode: return "DegenerateMode";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace condsweep
