#include "dronepaint/trajectory/filter.hpp"

#include "dronepaint/error.hpp"

namespace dronepaint::trajectory {

std::vector<std::vector<StrokePoint>> RawStroke::runs() const {
    std::vector<std::vector<StrokePoint>> out;
    std::size_t begin = 0;
    auto cut = [&](std::size_t end) {
        if (end > begin) {
            out.emplace_back(points.begin() + static_cast<std::ptrdiff_t>(begin),
                             points.begin() + static_cast<std::ptrdiff_t>(end));
        }
        begin = end;
    };
    for (std::size_t b : breaks) {
        cut(std::min(b, points.size()));
    }
    cut(points.size());
    return out;
}

void validate(const FilterParams& p) {
    if (!(p.alpha > 0.0 && p.alpha <= 1.0)) {
        fail(ErrorCode::ConfigError, "alpha must be in (0, 1]");
    }
    if (!(p.beta >= 0.0)) {
        fail(ErrorCode::ConfigError, "beta must be >= 0");
    }
    if (!(p.fallback_dt > 0.0)) {
        fail(ErrorCode::ConfigError, "fallback_dt must be positive");
    }
}

std::vector<StrokePoint> alpha_beta_filter(std::span<const StrokePoint> stroke, const FilterParams& p) {
    validate(p);
    if (stroke.empty()) {
        fail(ErrorCode::EmptyStroke, "cannot filter an empty stroke");
    }
    std::vector<StrokePoint> out;
    out.reserve(stroke.size());
    out.push_back(stroke.front());

    double x = stroke.front().x;
    double y = stroke.front().y;
    double vx = 0.0;
    double vy = 0.0;
    for (std::size_t i = 1; i < stroke.size(); ++i) {
        double dt = stroke[i].t - stroke[i - 1].t;
        if (!(dt > 0.0)) {
            dt = p.fallback_dt;
        }
        const double px = x + vx * dt;
        const double py = y + vy * dt;
        const double rx = stroke[i].x - px;
        const double ry = stroke[i].y - py;
        // Blend form keeps alpha = 1 exactly equal to the measurement.
        x = p.alpha * stroke[i].x + (1.0 - p.alpha) * px;
        y = p.alpha * stroke[i].y + (1.0 - p.alpha) * py;
        vx += (p.beta / dt) * rx;
        vy += (p.beta / dt) * ry;
        out.push_back({x, y, stroke[i].t});
    }
    return out;
}

} // namespace dronepaint::trajectory
