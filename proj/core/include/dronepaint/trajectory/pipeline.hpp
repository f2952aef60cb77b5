#pragma once

#include "dronepaint/error.hpp"
#include "dronepaint/trajectory/filter.hpp"
#include "dronepaint/trajectory/flight_zone.hpp"
#include "dronepaint/trajectory/stroke.hpp"

#include <nlohmann/json_fwd.hpp>

#include <optional>
#include <vector>

namespace dronepaint::trajectory {

struct TimedWaypoint {
    Vec3 position = Vec3::Zero();
    double dispatch_offset = 0.0; // seconds after the trajectory starts
};

// offset_0 = 0, offset_i = offset_{i-1} + |w_i - w_{i-1}| / speed.
// Throws ConfigError for speed <= 0 or an empty trajectory.
std::vector<TimedWaypoint> schedule_waypoints(std::span<const Vec3> waypoints, double speed);

// Drops every point within `radius` of `center`; each gap opened in the
// stroke becomes a run break.
RawStroke erase_region(const RawStroke& stroke, const Vec2& center, double radius);

struct PipelineParams {
    FilterParams filter;
    double spacing_px = 10.0;
    FlightZoneConfig zone;
    double speed = 0.25; // m/s
};

void validate(const PipelineParams& p);

// Keys: alpha, beta, fallback_dt.
nlohmann::json to_json(const FilterParams& p);
FilterParams filter_from_json(const nlohmann::json& doc, const FilterParams& base = {});

// Keys: spacing_px, speed. Filter and zone have their own documents.
nlohmann::json pipeline_to_json(const PipelineParams& p);
PipelineParams pipeline_from_json(const nlohmann::json& doc, const PipelineParams& base = {});

// filter -> resample (pixels) -> screen_to_world -> schedule, for one run.
std::vector<TimedWaypoint> process(std::span<const StrokePoint> run, const PipelineParams& p);

struct RunOutcome {
    std::vector<TimedWaypoint> schedule;
    std::optional<Error> error;
};

// `process` applied to every run of the stroke; per-run failures are reported,
// not thrown. An empty stroke yields a single EmptyStroke outcome.
std::vector<RunOutcome> process_runs(const RawStroke& stroke, const PipelineParams& p);

Polyline3 positions(std::span<const TimedWaypoint> schedule);

} // namespace dronepaint::trajectory
