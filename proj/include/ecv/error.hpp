#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ecv {

enum class ErrorKind {
    InvalidParameter,
    DimensionMismatch,
    Numeric,
    Io,
    Parse,
    DivisionByZero,
    OobExhausted,
    TuningFailed,
};

/// Stable machine-readable name, e.g. "invalid-parameter".
std::string_view error_kind_name(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

inline void require(bool condition, ErrorKind kind, const std::string& message) {
    if (!condition) fail(kind, message);
}

} // namespace ecv
