#include "dcurv/error.hpp"

namespace dcurv {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidInput: return "InvalidInput";
        case ErrorKind::InvalidConfig: return "InvalidConfig";
        case ErrorKind::DegenerateCloud: return "DegenerateCloud";
        case ErrorKind::ZeroRow: return "ZeroRow";
        case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
        case ErrorKind::EmptyRegion: return "EmptyRegion";
        case ErrorKind::DegenerateVariance: return "DegenerateVariance";
        case ErrorKind::InvalidSurfaceParams: return "InvalidSurfaceParams";
        case ErrorKind::NonFiniteLoss: return "NonFiniteLoss";
        case ErrorKind::ShapeMismatch: return "ShapeMismatch";
        case ErrorKind::RankDeficient: return "RankDeficient";
        case ErrorKind::LocalityFailure: return "LocalityFailure";
        case ErrorKind::NonFiniteValue: return "NonFiniteValue";
        case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

bool is_numeric_failure(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::ConvergenceFailure:
        case ErrorKind::DegenerateVariance:
        case ErrorKind::NonFiniteLoss:
        case ErrorKind::RankDeficient:
        case ErrorKind::LocalityFailure:
        case ErrorKind::NonFiniteValue:
            return true;
        default:
            return false;
    }
}

}  // namespace dcurv
