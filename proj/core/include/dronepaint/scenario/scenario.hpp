#pragma once

#include "dronepaint/canvas/exposure_canvas.hpp"
#include "dronepaint/metrics/trace_error.hpp"
#include "dronepaint/sim/episode.hpp"
#include "dronepaint/trajectory/pipeline.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace dronepaint::scenario {

// A ground-truth shape traced on screen at constant speed with Gaussian pixel noise.
struct ShapeInput {
    metrics::GroundTruthShape shape;
    double noise_px = 2.0;
    double rate_hz = 30.0;
    double speed_px_s = 120.0;
};

struct FileInput {
    std::filesystem::path path; // trajectory CSV in pixels, resolved against the scenario's directory
};

using Input = std::variant<ShapeInput, trajectory::RawStroke, FileInput>;

// Versioned JSON document ("format": "dronepaint-scenario", "version": 1).
// Top-level keys: zone, sim, field, obstacles, filter, pipeline, canvas, seed,
// truth, and exactly one of shape / stroke / file.
struct Scenario {
    trajectory::PipelineParams pipeline;
    sim::SimConfig sim;
    canvas::CanvasConfig canvas;
    std::uint64_t seed = 0;
    Input input = ShapeInput{};
    std::optional<metrics::GroundTruthShape> truth; // defaults to the input shape
};

Scenario parse_scenario(const std::string& text, const std::filesystem::path& base_dir = {});
nlohmann::json to_json(const Scenario& s);

// Walks the shape's screen projection from its first vertex at speed_px_s,
// sampling at rate_hz (plus the closing point), then adds N(0, noise_px^2) per axis.
std::vector<trajectory::StrokePoint> synth_stroke(const ShapeInput& input, const trajectory::FlightZoneConfig& zone,
                                                  std::mt19937_64& rng);

// The scenario's stroke; shape inputs are synthesized with `seed`.
trajectory::RawStroke resolve_stroke(const Scenario& s, std::uint64_t seed);

struct SimulationResult {
    trajectory::RawStroke stroke;
    sim::PaintPlan plan;
    sim::EpisodeResult episode;
    nlohmann::json report;
};

// Stroke -> pipeline -> episode -> reports. `seed` drives stroke synthesis and
// the simulation jitter.
SimulationResult simulate(const Scenario& s, std::uint64_t seed);

// Painted samples of one drone with its formation offset removed, in the
// drawing plane (x, z).
std::vector<metrics::TimedPoint2> painted_path(const sim::Trace& trace, const sim::SimConfig& config, int drone);

// trace.csv, events.jsonl, painting.ppm, report.json
void write_artifacts(const SimulationResult& r, const canvas::CanvasConfig& canvas,
                     const std::filesystem::path& dir);

} // namespace dronepaint::scenario
