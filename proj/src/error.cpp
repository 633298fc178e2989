#include "ecv/error.hpp"

namespace ecv {

std::string_view error_kind_name(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidParameter: return "invalid-parameter";
        case ErrorKind::DimensionMismatch: return "dimension-mismatch";
        case ErrorKind::Numeric: return "numeric";
        case ErrorKind::Io: return "io";
        case ErrorKind::Parse: return "parse";
        case ErrorKind::DivisionByZero: return "division-by-zero";
        case ErrorKind::OobExhausted: return "oob-exhausted";
        case ErrorKind::TuningFailed: return "tuning-failed";
    }
    return "unknown";
}

} // namespace ecv
