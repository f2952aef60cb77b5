#include "dronepaint/gesture/hand.hpp"

#include "dronepaint/error.hpp"

#include <cmath>
#include <string>

namespace dronepaint::gesture {

namespace {

constexpr std::array<std::string_view, kGestureCount> kNames = {
    "ONE", "TWO", "THREE", "FOUR", "FIVE", "OKAY", "ROCK", "THUMBS_UP",
};

} // namespace

std::string_view to_string(GestureClass g) noexcept {
    return kNames[index_of(g)];
}

std::optional<GestureClass> gesture_from_string(std::string_view name) noexcept {
    for (std::size_t i = 0; i < kNames.size(); ++i) {
        if (kNames[i] == name) {
            return static_cast<GestureClass>(i);
        }
    }
    return std::nullopt;
}

void validate(const HandFrame& frame) {
    for (std::size_t i = 0; i < kLandmarkCount; ++i) {
        const auto& lm = frame.landmarks[i];
        if (!std::isfinite(lm.x) || !std::isfinite(lm.y) || !std::isfinite(lm.z)) {
            fail(ErrorCode::InvalidFrame, "landmark " + std::to_string(i) + " is not finite");
        }
    }
    if (!std::isfinite(frame.timestamp)) {
        fail(ErrorCode::InvalidFrame, "timestamp is not finite");
    }
}

HandFrame make_frame(std::span<const Landmark> landmarks, double timestamp) {
    if (landmarks.size() != kLandmarkCount) {
        fail(ErrorCode::InvalidFrame,
             "expected 21 landmarks, got " + std::to_string(landmarks.size()));
    }
    HandFrame frame;
    std::copy(landmarks.begin(), landmarks.end(), frame.landmarks.begin());
    frame.timestamp = timestamp;
    validate(frame);
    return frame;
}

double palm_size(const HandFrame& frame, double image_w, double image_h) {
    if (!(image_w > 0.0) || !(image_h > 0.0)) {
        fail(ErrorCode::ConfigError, "image dimensions must be positive");
    }
    validate(frame);
    const auto& wrist = frame.landmarks[landmark::kWrist];
    const auto& base = frame.landmarks[landmark::kMiddleMcp];
    const double size = std::hypot((base.x - wrist.x) * image_w, (base.y - wrist.y) * image_h);
    if (size == 0.0) {
        fail(ErrorCode::DegenerateHand, "palm size is zero");
    }
    return size;
}

PixelPoint hand_position(const HandFrame& frame, double image_w, double image_h) {
    validate(frame);
    const auto& tip = frame.landmarks[landmark::kIndexTip];
    return {tip.x * image_w, tip.y * image_h};
}

DepthCalibration DepthCalibration::from_observation(double depth_m, double palm_px) {
    if (!(depth_m > 0.0) || !(palm_px > 0.0)) {
        fail(ErrorCode::ConfigError, "calibration needs positive depth and palm size");
    }
    return DepthCalibration{depth_m * palm_px};
}

double estimate_depth(double palm_px, const DepthCalibration& cal) {
    if (!(palm_px > 0.0)) {
        fail(ErrorCode::DegenerateHand, "palm size must be positive");
    }
    if (!(cal.k_palm > 0.0)) {
        fail(ErrorCode::ConfigError, "k_palm must be positive");
    }
    return cal.k_palm / palm_px;
}

} // namespace dronepaint::gesture
