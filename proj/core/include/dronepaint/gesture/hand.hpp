#pragma once

#include "dronepaint/types.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

namespace dronepaint::gesture {

inline constexpr std::size_t kLandmarkCount = 21;

// Standard 21-point hand indexing.
namespace landmark {
inline constexpr std::size_t kWrist = 0;
inline constexpr std::size_t kThumbTip = 4;
inline constexpr std::size_t kIndexMcp = 5;
inline constexpr std::size_t kIndexTip = 8;
inline constexpr std::size_t kMiddleMcp = 9;
inline constexpr std::size_t kMiddleTip = 12;
inline constexpr std::size_t kRingTip = 16;
inline constexpr std::size_t kPinkyTip = 20;
} // namespace landmark

// Normalized image coordinates; y grows downward, z is wrist-relative depth.
struct Landmark {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3 vec() const { return {x, y, z}; }
    friend bool operator==(const Landmark&, const Landmark&) = default;
};

struct HandFrame {
    std::array<Landmark, kLandmarkCount> landmarks{};
    double timestamp = 0.0;

    friend bool operator==(const HandFrame&, const HandFrame&) = default;
};

// Builds a frame from an arbitrary-length landmark list; anything other than
// 21 finite entries throws InvalidFrame.
HandFrame make_frame(std::span<const Landmark> landmarks, double timestamp);

// Throws InvalidFrame on non-finite coordinates.
void validate(const HandFrame& frame);

enum class GestureClass : int {
    One = 0,
    Two,
    Three,
    Four,
    Five,
    Okay,
    Rock,
    ThumbsUp,
};

inline constexpr std::size_t kGestureCount = 8;

inline constexpr std::array<GestureClass, kGestureCount> kAllGestures = {
    GestureClass::One,  GestureClass::Two,  GestureClass::Three, GestureClass::Four,
    GestureClass::Five, GestureClass::Okay, GestureClass::Rock,  GestureClass::ThumbsUp,
};

constexpr std::size_t index_of(GestureClass g) { return static_cast<std::size_t>(g); }

std::string_view to_string(GestureClass g) noexcept;
std::optional<GestureClass> gesture_from_string(std::string_view name) noexcept;

struct PixelPoint {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const PixelPoint&, const PixelPoint&) = default;
};

// Wrist to middle-finger base distance in pixels. Throws DegenerateHand when zero.
double palm_size(const HandFrame& frame, double image_w, double image_h);

// Drawing cursor: the index fingertip in pixels.
PixelPoint hand_position(const HandFrame& frame, double image_w, double image_h);

struct DepthCalibration {
    double k_palm = 60.0; // meters * pixels

    // Pinhole constant from one observation at a known distance.
    static DepthCalibration from_observation(double depth_m, double palm_px);
};

// Pinhole estimate depth = k_palm / palm_px. Throws DegenerateHand for palm_px <= 0.
double estimate_depth(double palm_px, const DepthCalibration& cal);

} // namespace dronepaint::gesture
