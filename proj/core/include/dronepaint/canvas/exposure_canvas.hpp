#pragma once

#include "dronepaint/trajectory/flight_zone.hpp"
#include "dronepaint/types.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <vector>

namespace dronepaint::canvas {

struct CanvasConfig {
    int width = 640;
    int height = 480;
    double sigma_px = 2.0;
    double intensity = 0.05; // per simulation step
    double gain = 1.0;

    friend bool operator==(const CanvasConfig&, const CanvasConfig&) = default;
};

void validate(const CanvasConfig& c);
nlohmann::json to_json(const CanvasConfig& c);
CanvasConfig canvas_from_json(const nlohmann::json& doc, const CanvasConfig& base = {});

// Long-exposure accumulation buffer: linear RGB, non-negative, row-major.
// Pixel (i, j) sits at canvas coordinate (i, j); world points reach the canvas
// through the flight zone's plane mapping scaled to the canvas size.
class ExposureCanvas {
public:
    ExposureCanvas(int width, int height, trajectory::FlightZoneConfig zone);

    int width() const { return width_; }
    int height() const { return height_; }
    const trajectory::FlightZoneConfig& zone() const { return zone_; }

    Vec2 project(const Vec3& world) const;

    // Adds intensity * exp(-r^2 / (2 sigma^2)) * led to every pixel within 3 sigma.
    void accumulate(const Vec3& world_pos, const Rgb& led, double intensity, double sigma_px);
    void accumulate_at(const Vec2& pixel, const Rgb& led, double intensity, double sigma_px);

    Rgb at(int x, int y) const;
    const std::vector<double>& buffer() const { return buffer_; }
    void clear();

private:
    int width_;
    int height_;
    trajectory::FlightZoneConfig zone_;
    std::vector<double> buffer_; // 3 * width * height
};

// Binary PPM (P6, maxval 255): clamp(gain * v, 0, 1)^(1/2.2), rounded to 8 bits.
std::vector<std::uint8_t> render(const ExposureCanvas& canvas, double exposure_gain);

std::uint8_t encode_channel(double linear, double gain);

} // namespace dronepaint::canvas
