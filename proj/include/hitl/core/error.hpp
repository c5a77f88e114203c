#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hitl {

enum class ErrorCode {
    invalid_argument,
    parse_error,
    invariant_violation,
    not_found,
    conflict,
    precondition_failed,
    io_error,
    protocol_error,
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::parse_error: return "parse_error";
    case ErrorCode::invariant_violation: return "invariant_violation";
    case ErrorCode::not_found: return "not_found";
    case ErrorCode::conflict: return "conflict";
    case ErrorCode::precondition_failed: return "precondition_failed";
    case ErrorCode::io_error: return "io_error";
    case ErrorCode::protocol_error: return "protocol_error";
    }
    return "unknown";
}

/// Every failure raised by the library. The code lets callers (and the HTTP
/// layer) map failures onto a response class without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

} // namespace hitl
