#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dcurv {

enum class ErrorKind {
    InvalidInput,
    InvalidConfig,
    DegenerateCloud,
    ZeroRow,
    ConvergenceFailure,
    EmptyRegion,
    DegenerateVariance,
    InvalidSurfaceParams,
    NonFiniteLoss,
    ShapeMismatch,
    RankDeficient,
    LocalityFailure,
    NonFiniteValue,
    Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// True for failures of a numerical procedure (as opposed to bad input).
bool is_numeric_failure(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

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

}  // namespace dcurv
