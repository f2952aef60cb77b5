#pragma once

#include "dronepaint/types.hpp"

#include <nlohmann/json_fwd.hpp>

#include <span>

namespace dronepaint::trajectory {

// Maps the drawing screen onto a vertical plane of the flight zone: screen x
// to world x, screen y to world z (flipped so the top of the screen is the
// highest altitude), world y fixed at `depth`.
struct FlightZoneConfig {
    double screen_x = 0.0;
    double screen_y = 0.0;
    double screen_w = 640.0;
    double screen_h = 480.0;
    double x_min = -1.5;
    double x_max = 1.5;
    double z_min = 0.5;
    double z_max = 2.5;
    double depth = 0.0;
    bool flip_y = true;

    Vec3 to_world(const Vec2& px) const; // clamps to the screen rect first
    Vec2 to_screen(const Vec3& world) const; // inverse, no clamping

    friend bool operator==(const FlightZoneConfig&, const FlightZoneConfig&) = default;
};

void validate(const FlightZoneConfig& zone);

Polyline3 screen_to_world(std::span<const Vec2> points, const FlightZoneConfig& zone);

nlohmann::json to_json(const FlightZoneConfig& zone);
FlightZoneConfig zone_from_json(const nlohmann::json& doc, const FlightZoneConfig& base = {});

} // namespace dronepaint::trajectory
