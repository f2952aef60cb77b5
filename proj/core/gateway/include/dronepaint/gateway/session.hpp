#pragma once

#include "dronepaint/canvas/exposure_canvas.hpp"
#include "dronepaint/command/fsm.hpp"
#include "dronepaint/gesture/classifier.hpp"
#include "dronepaint/metrics/trace_error.hpp"
#include "dronepaint/sim/world.hpp"
#include "dronepaint/trajectory/pipeline.hpp"

#include <nlohmann/json.hpp>

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace dronepaint::gateway {

struct SessionConfig {
    command::GestureMapping mapping = command::default_mapping();
    trajectory::PipelineParams pipeline;
    sim::SimConfig sim;
    canvas::CanvasConfig canvas;
};

// Partial overrides. Keys: mapping, zone, filter, pipeline, sim, field,
// obstacles, canvas; the filter keys (alpha, beta, fallback_dt) are also
// accepted at the top level. Unknown keys are ignored. Throws ConfigError.
SessionConfig apply_overrides(const nlohmann::json& overrides, const SessionConfig& base = {});
nlohmann::json to_json(const SessionConfig& c);

// One FSM, one stroke and one world. Not thread-safe: the owner serializes
// messages and ticks.
class Session {
public:
    Session(std::string id, SessionConfig config, std::shared_ptr<const gesture::GestureModel> model);

    const std::string& id() const { return id_; }
    const SessionConfig& config() const { return config_; }
    const command::CommandState& fsm() const { return fsm_; }
    const trajectory::RawStroke& stroke() const { return stroke_; }
    const sim::World& world() const { return world_; }
    const canvas::ExposureCanvas& painting() const { return canvas_; }

    // Parses one wire message and applies it. Returns the direct replies
    // (`gesture`, `painting`, `report`, `session`, `error`); state changes show
    // up in the next snapshot. A failed message leaves the session unchanged.
    std::vector<nlohmann::json> handle_message(const std::string& text);

    // Runs whole simulation steps covering `dt` seconds. Returns pushed
    // messages, e.g. the `report` when painting finishes.
    std::vector<nlohmann::json> advance(double dt);

    // `state` message: FSM mode, swarm phase, drones from the same step,
    // current stroke and schedule progress.
    nlohmann::json snapshot() const;

private:
    std::vector<nlohmann::json> dispatch(const nlohmann::json& msg);
    std::vector<nlohmann::json> on_hand_frame(const nlohmann::json& msg);
    std::vector<nlohmann::json> on_stroke_point(const nlohmann::json& msg);
    std::vector<nlohmann::json> on_command(const nlohmann::json& msg);
    std::vector<nlohmann::json> on_config(const nlohmann::json& msg);
    void apply_event(const command::CommandEvent& ev);
    nlohmann::json painting_message() const;
    std::optional<nlohmann::json> tracking_report() const;

    std::string id_;
    SessionConfig config_;
    std::shared_ptr<const gesture::GestureModel> model_;
    command::CommandState fsm_;
    trajectory::RawStroke stroke_;
    sim::World world_;
    canvas::ExposureCanvas canvas_;
    double pending_ = 0.0;
    bool reported_ = false;
    std::vector<metrics::TimedPoint2> flown_;
};

nlohmann::json error_message(std::string_view reason);

} // namespace dronepaint::gateway
