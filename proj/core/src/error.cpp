#include "dronepaint/error.hpp"

namespace dronepaint {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvalidFrame: return "InvalidFrame";
    case ErrorCode::DegenerateHand: return "DegenerateHand";
    case ErrorCode::ModelError: return "ModelError";
    case ErrorCode::EmptyStroke: return "EmptyStroke";
    case ErrorCode::DegenerateStroke: return "DegenerateStroke";
    case ErrorCode::CoincidentSource: return "CoincidentSource";
    case ErrorCode::DegenerateAnova: return "DegenerateAnova";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

} // namespace dronepaint
