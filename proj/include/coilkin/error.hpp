#pragma once

#include <stdexcept>
#include <string>

namespace coilkin {

enum class ErrorCode {
    InvalidState,
    UnreachableTarget,
    DegenerateTarget,
    ServoOutOfRange,
    EmptyWorkspace,
    ArmTooLow,
    EmptyCloud,
    EmptyMap,
    ParseError,
    IoError,
};

inline const char* to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::InvalidState: return "invalid-state";
    case ErrorCode::UnreachableTarget: return "unreachable-target";
    case ErrorCode::DegenerateTarget: return "degenerate-target";
    case ErrorCode::ServoOutOfRange: return "out-of-range";
    case ErrorCode::EmptyWorkspace: return "empty-workspace";
    case ErrorCode::ArmTooLow: return "arm-too-low";
    case ErrorCode::EmptyCloud: return "empty-cloud";
    case ErrorCode::EmptyMap: return "empty-map";
    case ErrorCode::ParseError: return "parse-error";
    case ErrorCode::IoError: return "io-error";
    }
    return "unknown";
}

// All library failures are reported through this one exception type; the
// code lets callers (the CLI in particular) map failures to exit statuses.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace coilkin
