#include "dronepaint/trajectory/flight_zone.hpp"

#include "dronepaint/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace dronepaint::trajectory {

void validate(const FlightZoneConfig& z) {
    const bool finite = std::isfinite(z.screen_x) && std::isfinite(z.screen_y) &&
                        std::isfinite(z.depth) && std::isfinite(z.x_min) && std::isfinite(z.z_min);
    if (!finite || !(z.screen_w > 0.0) || !(z.screen_h > 0.0) || !std::isfinite(z.screen_w) ||
        !std::isfinite(z.screen_h)) {
        fail(ErrorCode::ConfigError, "flight zone: screen rect is degenerate");
    }
    if (!(z.x_max > z.x_min) || !(z.z_max > z.z_min) || !std::isfinite(z.x_max) ||
        !std::isfinite(z.z_max)) {
        fail(ErrorCode::ConfigError, "flight zone: world ranges must be positive");
    }
}

Vec3 FlightZoneConfig::to_world(const Vec2& px) const {
    const double sx = std::clamp(px.x(), screen_x, screen_x + screen_w);
    const double sy = std::clamp(px.y(), screen_y, screen_y + screen_h);
    const double u = (sx - screen_x) / screen_w;
    const double v = (sy - screen_y) / screen_h;
    const double wx = x_min + u * (x_max - x_min);
    const double wz = flip_y ? z_max - v * (z_max - z_min) : z_min + v * (z_max - z_min);
    return {wx, depth, wz};
}

Vec2 FlightZoneConfig::to_screen(const Vec3& world) const {
    const double u = (world.x() - x_min) / (x_max - x_min);
    const double v = flip_y ? (z_max - world.z()) / (z_max - z_min)
                            : (world.z() - z_min) / (z_max - z_min);
    return {screen_x + u * screen_w, screen_y + v * screen_h};
}

Polyline3 screen_to_world(std::span<const Vec2> points, const FlightZoneConfig& zone) {
    validate(zone);
    Polyline3 out;
    out.reserve(points.size());
    for (const auto& p : points) {
        out.push_back(zone.to_world(p));
    }
    return out;
}

nlohmann::json to_json(const FlightZoneConfig& z) {
    return {{"screen", {z.screen_x, z.screen_y, z.screen_w, z.screen_h}},
            {"x_range", {z.x_min, z.x_max}},
            {"z_range", {z.z_min, z.z_max}},
            {"depth", z.depth},
            {"flip_y", z.flip_y}};
}

FlightZoneConfig zone_from_json(const nlohmann::json& doc, const FlightZoneConfig& base) {
    if (!doc.is_object()) {
        fail(ErrorCode::ConfigError, "zone must be an object");
    }
    FlightZoneConfig z = base;
    try {
        if (doc.contains("screen")) {
            const auto r = doc.at("screen").get<std::vector<double>>();
            if (r.size() != 4) {
                fail(ErrorCode::ConfigError, "zone.screen must be [x, y, w, h]");
            }
            z.screen_x = r[0];
            z.screen_y = r[1];
            z.screen_w = r[2];
            z.screen_h = r[3];
        }
        auto range = [&](const char* key, double& lo, double& hi) {
            if (doc.contains(key)) {
                const auto r = doc.at(key).get<std::vector<double>>();
                if (r.size() != 2) {
                    fail(ErrorCode::ConfigError, std::string("zone.") + key + " must be [min, max]");
                }
                lo = r[0];
                hi = r[1];
            }
        };
        range("x_range", z.x_min, z.x_max);
        range("z_range", z.z_min, z.z_max);
        z.depth = doc.value("depth", z.depth);
        z.flip_y = doc.value("flip_y", z.flip_y);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ConfigError, std::string("zone: ") + e.what());
    }
    validate(z);
    return z;
}

} // namespace dronepaint::trajectory
