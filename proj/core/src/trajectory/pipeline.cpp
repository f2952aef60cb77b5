#include "dronepaint/trajectory/pipeline.hpp"

#include "dronepaint/trajectory/resample.hpp"

#include <nlohmann/json.hpp>

#include <cmath>

namespace dronepaint::trajectory {

std::vector<TimedWaypoint> schedule_waypoints(std::span<const Vec3> waypoints, double speed) {
    if (!(speed > 0.0) || !std::isfinite(speed)) {
        fail(ErrorCode::ConfigError, "flight speed must be positive");
    }
    if (waypoints.empty()) {
        fail(ErrorCode::ConfigError, "cannot schedule an empty trajectory");
    }
    std::vector<TimedWaypoint> out;
    out.reserve(waypoints.size());
    out.push_back({waypoints.front(), 0.0});
    for (std::size_t i = 1; i < waypoints.size(); ++i) {
        const double dist = (waypoints[i] - waypoints[i - 1]).norm();
        out.push_back({waypoints[i], out.back().dispatch_offset + dist / speed});
    }
    return out;
}

RawStroke erase_region(const RawStroke& stroke, const Vec2& center, double radius) {
    if (!(radius > 0.0)) {
        fail(ErrorCode::ConfigError, "erase radius must be positive");
    }
    RawStroke out;
    std::size_t next_break = 0;
    bool gap = false;
    for (std::size_t i = 0; i < stroke.points.size(); ++i) {
        if (next_break < stroke.breaks.size() && stroke.breaks[next_break] == i) {
            gap = true;
            ++next_break;
        }
        const auto& p = stroke.points[i];
        if ((Vec2(p.x, p.y) - center).norm() <= radius) {
            gap = true;
            continue;
        }
        if (gap && !out.points.empty()) {
            out.breaks.push_back(out.points.size());
        }
        gap = false;
        out.points.push_back(p);
    }
    return out;
}

void validate(const PipelineParams& p) {
    validate(p.filter);
    validate(p.zone);
    if (!(p.spacing_px > 0.0)) {
        fail(ErrorCode::ConfigError, "spacing_px must be positive");
    }
    if (!(p.speed > 0.0)) {
        fail(ErrorCode::ConfigError, "speed must be positive");
    }
}

std::vector<TimedWaypoint> process(std::span<const StrokePoint> run, const PipelineParams& p) {
    validate(p);
    if (run.empty()) {
        fail(ErrorCode::EmptyStroke, "stroke is empty");
    }
    const auto smoothed = alpha_beta_filter(run, p.filter);
    Polyline2 pixels;
    pixels.reserve(smoothed.size());
    for (const auto& s : smoothed) {
        pixels.emplace_back(s.x, s.y);
    }
    const auto uniform = resample_uniform(pixels, p.spacing_px);
    const auto world = screen_to_world(uniform, p.zone);
    return schedule_waypoints(world, p.speed);
}

std::vector<RunOutcome> process_runs(const RawStroke& stroke, const PipelineParams& p) {
    validate(p);
    std::vector<RunOutcome> out;
    if (stroke.empty()) {
        out.push_back({{}, Error(ErrorCode::EmptyStroke, "stroke is empty")});
        return out;
    }
    for (const auto& run : stroke.runs()) {
        try {
            out.push_back({process(run, p), std::nullopt});
        } catch (const Error& e) {
            out.push_back({{}, e});
        }
    }
    return out;
}

Polyline3 positions(std::span<const TimedWaypoint> schedule) {
    Polyline3 out;
    out.reserve(schedule.size());
    for (const auto& w : schedule) {
        out.push_back(w.position);
    }
    return out;
}

nlohmann::json to_json(const FilterParams& p) {
    return {{"alpha", p.alpha}, {"beta", p.beta}, {"fallback_dt", p.fallback_dt}};
}

FilterParams filter_from_json(const nlohmann::json& doc, const FilterParams& base) {
    if (!doc.is_object()) {
        fail(ErrorCode::ConfigError, "filter must be an object");
    }
    FilterParams p = base;
    try {
        p.alpha = doc.value("alpha", p.alpha);
        p.beta = doc.value("beta", p.beta);
        p.fallback_dt = doc.value("fallback_dt", p.fallback_dt);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ConfigError, std::string("filter: ") + e.what());
    }
    validate(p);
    return p;
}

nlohmann::json pipeline_to_json(const PipelineParams& p) {
    return {{"spacing_px", p.spacing_px}, {"speed", p.speed}};
}

PipelineParams pipeline_from_json(const nlohmann::json& doc, const PipelineParams& base) {
    if (!doc.is_object()) {
        fail(ErrorCode::ConfigError, "pipeline must be an object");
    }
    PipelineParams p = base;
    try {
        p.spacing_px = doc.value("spacing_px", p.spacing_px);
        p.speed = doc.value("speed", p.speed);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ConfigError, std::string("pipeline: ") + e.what());
    }
    validate(p);
    return p;
}

} // namespace dronepaint::trajectory
