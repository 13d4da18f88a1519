#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace condsweep {

enum class ErrorCode {
    InvalidArgument,
    AmbiguousSlerp,
    DegenerateMesh,
    DegenerateCloud,
    EmptyCloud,
    OutOfBounds,
    DimMismatch,
    BackendUnavailable,
    BackendError,
    ProtocolError,
    RequiresWeld,
    InsufficientData,
    DegenerateMode,
    InvalidParams,
    ParseError,
    IoError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so the
/// CLI can report it in a single machine-parseable line.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace condsweep
