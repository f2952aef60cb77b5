#include "dronepaint/canvas/exposure_canvas.hpp"

#include "dronepaint/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace dronepaint::canvas {

void validate(const CanvasConfig& c) {
    if (c.width <= 0 || c.height <= 0) {
        fail(ErrorCode::ConfigError, "canvas dimensions must be positive");
    }
    if (!(c.sigma_px > 0.0) || !(c.intensity >= 0.0) || !(c.gain > 0.0)) {
        fail(ErrorCode::ConfigError, "canvas: sigma and gain must be positive, intensity >= 0");
    }
}

nlohmann::json to_json(const CanvasConfig& c) {
    return {{"width", c.width},
            {"height", c.height},
            {"sigma_px", c.sigma_px},
            {"intensity", c.intensity},
            {"gain", c.gain}};
}

CanvasConfig canvas_from_json(const nlohmann::json& doc, const CanvasConfig& base) {
    if (!doc.is_object()) {
        fail(ErrorCode::ConfigError, "canvas must be an object");
    }
    CanvasConfig c = base;
    try {
        c.width = doc.value("width", c.width);
        c.height = doc.value("height", c.height);
        c.sigma_px = doc.value("sigma_px", c.sigma_px);
        c.intensity = doc.value("intensity", c.intensity);
        c.gain = doc.value("gain", c.gain);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ConfigError, std::string("canvas: ") + e.what());
    }
    validate(c);
    return c;
}

ExposureCanvas::ExposureCanvas(int width, int height, trajectory::FlightZoneConfig zone)
    : width_(width), height_(height), zone_(zone) {
    if (width <= 0 || height <= 0) {
        fail(ErrorCode::ConfigError, "canvas dimensions must be positive");
    }
    trajectory::validate(zone_);
    buffer_.assign(static_cast<std::size_t>(3 * width * height), 0.0);
}

Vec2 ExposureCanvas::project(const Vec3& world) const {
    const Vec2 s = zone_.to_screen(world);
    return {(s.x() - zone_.screen_x) * (width_ / zone_.screen_w),
            (s.y() - zone_.screen_y) * (height_ / zone_.screen_h)};
}

void ExposureCanvas::accumulate(const Vec3& world_pos, const Rgb& led, double intensity,
                                double sigma_px) {
    accumulate_at(project(world_pos), led, intensity, sigma_px);
}

void ExposureCanvas::accumulate_at(const Vec2& pixel, const Rgb& led, double intensity,
                                   double sigma_px) {
    if (!(sigma_px > 0.0)) {
        fail(ErrorCode::ConfigError, "splat sigma must be positive");
    }
    if (!pixel.allFinite()) {
        return;
    }
    const double reach = 3.0 * sigma_px;
    const double x_lo = std::max(0.0, std::ceil(pixel.x() - reach));
    const double x_hi = std::min(width_ - 1.0, std::floor(pixel.x() + reach));
    const double y_lo = std::max(0.0, std::ceil(pixel.y() - reach));
    const double y_hi = std::min(height_ - 1.0, std::floor(pixel.y() + reach));
    if (x_lo > x_hi || y_lo > y_hi) {
        return;
    }
    const double inv = 1.0 / (2.0 * sigma_px * sigma_px);
    for (int j = static_cast<int>(y_lo); j <= static_cast<int>(y_hi); ++j) {
        for (int i = static_cast<int>(x_lo); i <= static_cast<int>(x_hi); ++i) {
            const double dx = i - pixel.x();
            const double dy = j - pixel.y();
            const double r2 = dx * dx + dy * dy;
            if (r2 > reach * reach) {
                continue;
            }
            const double w = intensity * std::exp(-r2 * inv);
            auto* px = &buffer_[3 * (static_cast<std::size_t>(j) * width_ + i)];
            px[0] += w * led.r;
            px[1] += w * led.g;
            px[2] += w * led.b;
        }
    }
}

Rgb ExposureCanvas::at(int x, int y) const {
    const auto* px = &buffer_[3 * (static_cast<std::size_t>(y) * width_ + x)];
    return {px[0], px[1], px[2]};
}

void ExposureCanvas::clear() {
    std::fill(buffer_.begin(), buffer_.end(), 0.0);
}

std::uint8_t encode_channel(double linear, double gain) {
    const double v = std::clamp(gain * linear, 0.0, 1.0);
    return static_cast<std::uint8_t>(std::lround(std::pow(v, 1.0 / 2.2) * 255.0));
}

std::vector<std::uint8_t> render(const ExposureCanvas& canvas, double exposure_gain) {
    if (!(exposure_gain > 0.0)) {
        fail(ErrorCode::ConfigError, "exposure gain must be positive");
    }
    const std::string header =
        "P6\n" + std::to_string(canvas.width()) + " " + std::to_string(canvas.height()) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.reserve(header.size() + canvas.buffer().size());
    for (double v : canvas.buffer()) {
        out.push_back(encode_channel(v, exposure_gain));
    }
    return out;
}

} // namespace dronepaint::canvas
