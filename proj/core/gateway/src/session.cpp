#include "dronepaint/gateway/session.hpp"

#include "dronepaint/error.hpp"
#include "dronepaint/field/potential_field.hpp"
#include "dronepaint/gesture/features.hpp"
#include "dronepaint/sim/episode.hpp"
#include "dronepaint/util/digest.hpp"

#include <cmath>

namespace dronepaint::gateway {

namespace {

double number(const nlohmann::json& msg, const char* key) {
    const auto it = msg.find(key);
    if (it == msg.end() || !it->is_number()) {
        fail(ErrorCode::ParseError, std::string("field '") + key + "' must be a number");
    }
    const double v = it->get<double>();
    if (!std::isfinite(v)) {
        fail(ErrorCode::ParseError, std::string("field '") + key + "' must be finite");
    }
    return v;
}

nlohmann::json rgb(const Rgb& c) {
    return {c.r, c.g, c.b};
}

} // namespace

nlohmann::json error_message(std::string_view reason) {
    return {{"type", "error"}, {"reason", reason}};
}

SessionConfig apply_overrides(const nlohmann::json& overrides, const SessionConfig& base) {
    if (!overrides.is_object()) {
        fail(ErrorCode::ConfigError, "config overrides must be an object");
    }
    SessionConfig c = base;
    if (overrides.contains("mapping")) {
        c.mapping = command::mapping_from_json(overrides.at("mapping"), c.mapping);
    }
    if (overrides.contains("zone")) {
        c.pipeline.zone = trajectory::zone_from_json(overrides.at("zone"), c.pipeline.zone);
    }
    nlohmann::json filter = overrides.contains("filter") ? overrides.at("filter") : nlohmann::json::object();
    if (!filter.is_object()) {
        fail(ErrorCode::ConfigError, "filter must be an object");
    }
    for (const char* key : {"alpha", "beta", "fallback_dt"}) {
        if (overrides.contains(key)) {
            filter[key] = overrides.at(key);
        }
    }
    c.pipeline.filter = trajectory::filter_from_json(filter, c.pipeline.filter);
    if (overrides.contains("pipeline")) {
        c.pipeline = trajectory::pipeline_from_json(overrides.at("pipeline"), c.pipeline);
    }
    if (overrides.contains("sim")) {
        c.sim = sim::sim_from_json(overrides.at("sim"), c.sim);
    }
    if (overrides.contains("field")) {
        c.sim.field = field::field_from_json(overrides.at("field"), c.sim.field);
    }
    if (overrides.contains("obstacles")) {
        const auto& obs = overrides.at("obstacles");
        if (!obs.is_array()) {
            fail(ErrorCode::ConfigError, "obstacles must be an array");
        }
        c.sim.obstacles.clear();
        for (const auto& o : obs) {
            c.sim.obstacles.push_back(field::obstacle_from_json(o));
        }
    }
    if (overrides.contains("canvas")) {
        c.canvas = canvas::canvas_from_json(overrides.at("canvas"), c.canvas);
    }
    command::validate(c.mapping);
    trajectory::validate(c.pipeline);
    sim::validate(c.sim);
    canvas::validate(c.canvas);
    return c;
}

nlohmann::json to_json(const SessionConfig& c) {
    nlohmann::json obstacles = nlohmann::json::array();
    for (const auto& o : c.sim.obstacles) {
        obstacles.push_back(field::to_json(o));
    }
    return {
        {"mapping", command::to_json(c.mapping)},
        {"zone", trajectory::to_json(c.pipeline.zone)},
        {"filter", trajectory::to_json(c.pipeline.filter)},
        {"pipeline", trajectory::pipeline_to_json(c.pipeline)},
        {"sim", sim::to_json(c.sim)},
        {"field", field::to_json(c.sim.field)},
        {"obstacles", obstacles},
        {"canvas", canvas::to_json(c.canvas)},
    };
}

Session::Session(std::string id, SessionConfig config, std::shared_ptr<const gesture::GestureModel> model)
    : id_(std::move(id)),
      config_(std::move(config)),
      model_(std::move(model)),
      world_(config_.sim),
      canvas_(config_.canvas.width, config_.canvas.height, config_.pipeline.zone) {}

std::vector<nlohmann::json> Session::handle_message(const std::string& text) {
    nlohmann::json msg;
    try {
        msg = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        return {error_message(std::string("malformed message: ") + e.what())};
    }
    if (!msg.is_object() || !msg.contains("type") || !msg.at("type").is_string()) {
        return {error_message("message must be an object with a string 'type'")};
    }
    try {
        return dispatch(msg);
    } catch (const Error& e) {
        return {error_message(e.what())};
    } catch (const nlohmann::json::exception& e) {
        return {error_message(std::string("malformed message: ") + e.what())};
    }
}

std::vector<nlohmann::json> Session::dispatch(const nlohmann::json& msg) {
    const std::string type = msg.at("type").get<std::string>();
    if (type == "hand_frame") {
        return on_hand_frame(msg);
    }
    if (type == "stroke_point") {
        return on_stroke_point(msg);
    }
    if (type == "command") {
        return on_command(msg);
    }
    if (type == "config") {
        return on_config(msg);
    }
    if (type == "session") {
        return {{{"type", "session"}, {"id", id_}}};
    }
    fail(ErrorCode::ParseError, "unknown message type '" + type + "'");
}

std::vector<nlohmann::json> Session::on_hand_frame(const nlohmann::json& msg) {
    const auto it = msg.find("landmarks");
    if (it == msg.end() || !it->is_array()) {
        fail(ErrorCode::ParseError, "field 'landmarks' must be an array of [x, y, z]");
    }
    std::vector<gesture::Landmark> landmarks;
    for (const auto& p : *it) {
        if (!p.is_array() || p.size() != 3 || !p[0].is_number() || !p[1].is_number() || !p[2].is_number()) {
            fail(ErrorCode::ParseError, "landmark must be [x, y, z]");
        }
        landmarks.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>()});
    }
    const double t = number(msg, "t");
    const gesture::HandFrame frame = gesture::make_frame(landmarks, t);
    if (!model_) {
        fail(ErrorCode::ModelError, "no gesture model loaded");
    }
    const auto features = gesture::extract_features(frame);
    const gesture::Prediction pred = gesture::classify(*model_, features);

    command::Observation obs;
    obs.gesture = pred.label;
    obs.confidence = pred.confidence;
    obs.cursor = gesture::hand_position(frame, config_.pipeline.zone.screen_w, config_.pipeline.zone.screen_h);
    obs.t = t;

    const command::CommandState before = fsm_;
    auto step = command::step_fsm(fsm_, obs, config_.mapping);
    fsm_ = std::move(step.state);
    try {
        apply_event(step.event);
    } catch (const Error&) {
        fsm_ = before;
        throw;
    }
    return {{{"type", "gesture"}, {"class", gesture::to_string(pred.label)}, {"confidence", pred.confidence}, {"t", t}}};
}

std::vector<nlohmann::json> Session::on_stroke_point(const nlohmann::json& msg) {
    const trajectory::StrokePoint p{number(msg, "x"), number(msg, "y"), number(msg, "t")};
    if (!stroke_.empty() && p.t < stroke_.points.back().t) {
        fail(ErrorCode::ConfigError, "stroke timestamps must be non-decreasing");
    }
    stroke_.points.push_back(p);
    return {};
}

std::vector<nlohmann::json> Session::on_command(const nlohmann::json& msg) {
    const auto it = msg.find("name");
    if (it == msg.end() || !it->is_string()) {
        fail(ErrorCode::ParseError, "field 'name' must be a command name");
    }
    const std::string name = it->get<std::string>();
    if (name == "SNAPSHOT") {
        return {painting_message()};
    }
    if (name == "ERASE_AT") {
        const double radius = msg.contains("radius") ? number(msg, "radius") : config_.mapping.erase_radius;
        auto erased = trajectory::erase_region(stroke_, Vec2(number(msg, "x"), number(msg, "y")), radius);
        if (erased == stroke_) {
            fail(ErrorCode::ConfigError, "ERASE_AT removed no stroke points");
        }
        stroke_ = std::move(erased);
        return {};
    }
    const auto cmd = command::command_from_string(name);
    if (!cmd || *cmd == command::Command::None) {
        fail(ErrorCode::ParseError, "unknown command '" + name + "'");
    }
    std::optional<gesture::PixelPoint> cursor;
    if (msg.contains("x") || msg.contains("y")) {
        cursor = gesture::PixelPoint{number(msg, "x"), number(msg, "y")};
    }
    const double t = msg.contains("t") ? number(msg, "t") : world_.time();

    const command::CommandState before = fsm_;
    auto step = command::apply_command(fsm_, *cmd, cursor, t, config_.mapping);
    if (step.event.kind == command::CommandEvent::Kind::None && step.state.mode == before.mode) {
        fail(ErrorCode::ConfigError,
             "command " + name + " has no effect in mode " + std::string(command::to_string(before.mode)));
    }
    fsm_ = std::move(step.state);
    try {
        apply_event(step.event);
    } catch (const Error&) {
        fsm_ = before;
        throw;
    }
    return {};
}

std::vector<nlohmann::json> Session::on_config(const nlohmann::json& msg) {
    nlohmann::json overrides = msg;
    overrides.erase("type");
    SessionConfig next = apply_overrides(overrides, config_);
    const bool world_changed = sim::to_json(next.sim) != sim::to_json(config_.sim) ||
                               field::to_json(next.sim.field) != field::to_json(config_.sim.field) ||
                               next.sim.obstacles.size() != config_.sim.obstacles.size();
    if (world_changed && fsm_.mode != command::Mode::Grounded) {
        fail(ErrorCode::ConfigError, "sim settings can only change while grounded");
    }
    const bool canvas_changed = !(next.canvas == config_.canvas) || !(next.pipeline.zone == config_.pipeline.zone);
    config_ = std::move(next);
    if (world_changed) {
        world_ = sim::World(config_.sim);
    }
    if (canvas_changed) {
        canvas_ = canvas::ExposureCanvas(config_.canvas.width, config_.canvas.height, config_.pipeline.zone);
    }
    return {{{"type", "config"}, {"config", to_json(config_)}}};
}

void Session::apply_event(const command::CommandEvent& ev) {
    using K = command::CommandEvent::Kind;
    switch (ev.kind) {
    case K::None:
        break;
    case K::TakeOff:
        world_.take_off();
        break;
    case K::Land:
        world_.land();
        break;
    case K::DrawPoint:
        stroke_.points.push_back({ev.x, ev.y, ev.t});
        break;
    case K::EraseAt:
        stroke_ = trajectory::erase_region(stroke_, Vec2(ev.x, ev.y), ev.radius);
        break;
    case K::Clear:
        if (stroke_.empty()) {
            fail(ErrorCode::ConfigError, "nothing to clear: the stroke is empty");
        }
        stroke_ = {};
        break;
    case K::BeginPaint: {
        if (stroke_.empty()) {
            fail(ErrorCode::EmptyStroke, "nothing to paint: the stroke is empty");
        }
        std::vector<std::vector<trajectory::TimedWaypoint>> runs;
        std::optional<Error> first_error;
        for (auto& outcome : trajectory::process_runs(stroke_, config_.pipeline)) {
            if (outcome.error) {
                if (!first_error) {
                    first_error = outcome.error;
                }
            } else {
                runs.push_back(std::move(outcome.schedule));
            }
        }
        if (runs.empty()) {
            throw *first_error;
        }
        world_.begin_paint(sim::join_runs(runs, config_.pipeline.speed));
        flown_.clear();
        reported_ = false;
        break;
    }
    }
}

std::vector<nlohmann::json> Session::advance(double dt) {
    std::vector<nlohmann::json> pushed;
    pending_ += dt;
    const double step = config_.sim.dt;
    const Vec3 offset = config_.sim.offset_for(0);
    while (pending_ >= step) {
        pending_ -= step;
        world_.step(step);
        sim::expose(canvas_, world_, config_.canvas);
        const auto& d0 = world_.drones().front();
        if (world_.phase() == sim::SwarmPhase::Painting && d0.led_on) {
            const Vec3 p = d0.position - offset;
            flown_.push_back({Vec2(p.x(), p.z()), world_.time()});
        }
        if (world_.phase() == sim::SwarmPhase::Done && !reported_) {
            reported_ = true;
            if (auto report = tracking_report()) {
                pushed.push_back(std::move(*report));
            }
        }
    }
    return pushed;
}

std::optional<nlohmann::json> Session::tracking_report() const {
    std::vector<Vec2> planned;
    for (const auto& w : world_.plan().waypoints) {
        planned.emplace_back(w.position.x(), w.position.z());
    }
    if (planned.size() < 2 || flown_.size() < 2) {
        return std::nullopt;
    }
    try {
        const auto report = metrics::trace_errors(flown_, planned);
        nlohmann::json msg = metrics::to_json(report);
        msg["type"] = "report";
        return msg;
    } catch (const Error&) {
        return std::nullopt;
    }
}

nlohmann::json Session::painting_message() const {
    const auto ppm = canvas::render(canvas_, config_.canvas.gain);
    return {{"type", "painting"},
            {"width", canvas_.width()},
            {"height", canvas_.height()},
            {"format", "P6"},
            {"data", util::base64_encode(ppm)}};
}

nlohmann::json Session::snapshot() const {
    nlohmann::json drones = nlohmann::json::array();
    for (const auto& d : world_.drones()) {
        drones.push_back({{"id", d.id},
                          {"x", d.position.x()},
                          {"y", d.position.y()},
                          {"z", d.position.z()},
                          {"vx", d.velocity.x()},
                          {"vy", d.velocity.y()},
                          {"vz", d.velocity.z()},
                          {"status", sim::to_string(d.status)},
                          {"led", rgb(d.led)},
                          {"led_on", d.led_on}});
    }
    nlohmann::json stroke = nlohmann::json::array();
    for (const auto& p : stroke_.points) {
        stroke.push_back({p.x, p.y, p.t});
    }
    const auto progress = world_.progress();
    return {
        {"type", "state"},
        {"id", id_},
        {"t", world_.time()},
        {"mode", command::to_string(fsm_.mode)},
        {"phase", sim::to_string(world_.phase())},
        {"drones", drones},
        {"stroke", stroke},
        {"breaks", stroke_.breaks},
        {"progress", {{"index", progress.index}, {"total", progress.total}, {"painting", progress.painting}}},
    };
}

} // namespace dronepaint::gateway
