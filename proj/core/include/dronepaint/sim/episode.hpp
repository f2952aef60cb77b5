#pragma once

#include "dronepaint/canvas/exposure_canvas.hpp"
#include "dronepaint/sim/world.hpp"

#include <string>
#include <vector>

namespace dronepaint::sim {

struct DroneSample {
    int id = 0;
    Vec3 position = Vec3::Zero();
    Vec3 velocity = Vec3::Zero();
    Rgb led; // zero when the light is off
};

struct TraceFrame {
    double t = 0.0;
    std::vector<DroneSample> drones;
};

using Trace = std::vector<TraceFrame>;

TraceFrame capture(const World& world);

// Splats every lit drone onto the canvas.
void expose(canvas::ExposureCanvas& canvas, const World& world, const canvas::CanvasConfig& cfg);

struct EpisodeResult {
    Trace trace;
    std::vector<SimEvent> events;
    canvas::ExposureCanvas painting;
    bool completed = false; // false when a phase hit its timeout
};

// Headless take-off -> paint -> land. The initial state (t = 0, all grounded)
// is the first trace frame; after that one frame per simulation step.
EpisodeResult run_episode(const SimConfig& config, const PaintPlan& plan,
                          const trajectory::FlightZoneConfig& zone, const canvas::CanvasConfig& canvas);

// Minimum pairwise distance over every frame. Throws ConfigError with < 2 drones.
double min_separation(const Trace& trace);

// `t,drone_id,x,y,z,vx,vy,vz,led_r,led_g,led_b` with a header row.
std::string write_trace_csv(const Trace& trace);
Trace parse_trace_csv(const std::string& text);

std::string write_events_jsonl(const std::vector<SimEvent>& events);

} // namespace dronepaint::sim
