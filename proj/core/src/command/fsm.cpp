#include "dronepaint/command/fsm.hpp"

#include "dronepaint/error.hpp"

#include <nlohmann/json.hpp>

#include <string>

namespace dronepaint::command {

namespace {

constexpr std::array<std::string_view, 8> kCommandNames = {
    "NONE", "TAKE_OFF", "LAND", "DRAW", "ERASE", "BEGIN_PAINT", "IDLE", "CLEAR",
};

bool airborne(Mode m) { return m != Mode::Grounded; }

CommandEvent emit_for_mode(CommandState& state, const std::optional<PixelPoint>& cursor, double t,
                           const GestureMapping& mapping) {
    if (!cursor) {
        return {};
    }
    if (state.mode == Mode::Drawing) {
        if (state.last_draw_t && t <= *state.last_draw_t) {
            return {};
        }
        state.last_draw_t = t;
        return {CommandEvent::Kind::DrawPoint, cursor->x, cursor->y, t, 0.0};
    }
    if (state.mode == Mode::Erasing) {
        return {CommandEvent::Kind::EraseAt, cursor->x, cursor->y, t, mapping.erase_radius};
    }
    return {};
}

// Mode change for a command; returns the event it produces on its own, if any.
CommandEvent transition(CommandState& state, Command cmd) {
    using K = CommandEvent::Kind;
    switch (cmd) {
    case Command::TakeOff:
        if (state.mode == Mode::Grounded) {
            state.mode = Mode::FlyingIdle;
            return {K::TakeOff};
        }
        break;
    case Command::Land:
        if (airborne(state.mode)) {
            state.mode = Mode::Grounded;
            return {K::Land};
        }
        break;
    case Command::Draw:
        if (airborne(state.mode)) {
            state.mode = Mode::Drawing;
        }
        break;
    case Command::Erase:
        if (airborne(state.mode)) {
            state.mode = Mode::Erasing;
        }
        break;
    case Command::Idle:
        if (airborne(state.mode)) {
            state.mode = Mode::FlyingIdle;
        }
        break;
    case Command::BeginPaint:
        if (airborne(state.mode)) {
            state.mode = Mode::Painting;
            return {K::BeginPaint};
        }
        break;
    case Command::Clear:
        if (airborne(state.mode)) {
            return {K::Clear};
        }
        break;
    case Command::None:
        break;
    }
    return {};
}

} // namespace

std::string_view to_string(Mode mode) noexcept {
    switch (mode) {
    case Mode::Grounded: return "GROUNDED";
    case Mode::FlyingIdle: return "FLYING_IDLE";
    case Mode::Drawing: return "DRAWING";
    case Mode::Erasing: return "ERASING";
    case Mode::Painting: return "PAINTING";
    }
    return "GROUNDED";
}

std::string_view to_string(Command cmd) noexcept {
    return kCommandNames[static_cast<std::size_t>(cmd)];
}

std::optional<Command> command_from_string(std::string_view name) noexcept {
    for (std::size_t i = 0; i < kCommandNames.size(); ++i) {
        if (kCommandNames[i] == name) {
            return static_cast<Command>(i);
        }
    }
    return std::nullopt;
}

std::string_view to_string(CommandEvent::Kind kind) noexcept {
    using K = CommandEvent::Kind;
    switch (kind) {
    case K::None: return "NONE";
    case K::TakeOff: return "TAKE_OFF";
    case K::Land: return "LAND";
    case K::DrawPoint: return "DRAW_POINT";
    case K::EraseAt: return "ERASE_AT";
    case K::BeginPaint: return "BEGIN_PAINT";
    case K::Clear: return "CLEAR";
    }
    return "NONE";
}

GestureMapping default_mapping() {
    GestureMapping m;
    m.commands.fill(Command::None);
    auto set = [&](GestureClass g, Command c) { m.commands[gesture::index_of(g)] = c; };
    set(GestureClass::ThumbsUp, Command::TakeOff);
    set(GestureClass::Okay, Command::Land);
    set(GestureClass::One, Command::Draw);
    set(GestureClass::Two, Command::Erase);
    set(GestureClass::Rock, Command::BeginPaint);
    set(GestureClass::Five, Command::Idle);
    return m;
}

void validate(const GestureMapping& mapping) {
    if (!(mapping.threshold >= 0.0 && mapping.threshold <= 1.0)) {
        fail(ErrorCode::ConfigError, "mapping threshold must be in [0, 1]");
    }
    if (mapping.debounce_frames < 1) {
        fail(ErrorCode::ConfigError, "debounce_frames must be >= 1");
    }
    if (!(mapping.erase_radius > 0.0)) {
        fail(ErrorCode::ConfigError, "erase_radius must be positive");
    }
    std::array<bool, kCommandNames.size()> used{};
    for (Command c : mapping.commands) {
        if (c == Command::None) {
            continue;
        }
        auto& seen = used[static_cast<std::size_t>(c)];
        if (seen) {
            fail(ErrorCode::ConfigError,
                 "command " + std::string(to_string(c)) + " is mapped to more than one gesture");
        }
        seen = true;
    }
}

nlohmann::json to_json(const GestureMapping& mapping) {
    nlohmann::json gestures = nlohmann::json::object();
    for (GestureClass g : gesture::kAllGestures) {
        gestures[std::string(gesture::to_string(g))] = std::string(to_string(mapping.command_for(g)));
    }
    return {{"gestures", gestures},
            {"threshold", mapping.threshold},
            {"debounce_frames", mapping.debounce_frames},
            {"erase_radius", mapping.erase_radius}};
}

GestureMapping mapping_from_json(const nlohmann::json& doc, const GestureMapping& base) {
    if (!doc.is_object()) {
        fail(ErrorCode::ConfigError, "mapping must be an object");
    }
    GestureMapping m = base;
    try {
        if (doc.contains("gestures")) {
            for (const auto& [name, value] : doc.at("gestures").items()) {
                const auto g = gesture::gesture_from_string(name);
                if (!g) {
                    fail(ErrorCode::ConfigError, "mapping: unknown gesture '" + name + "'");
                }
                const auto c = command_from_string(value.get<std::string>());
                if (!c) {
                    fail(ErrorCode::ConfigError, "mapping: unknown command for " + name);
                }
                m.commands[gesture::index_of(*g)] = *c;
            }
        }
        m.threshold = doc.value("threshold", m.threshold);
        m.debounce_frames = doc.value("debounce_frames", m.debounce_frames);
        m.erase_radius = doc.value("erase_radius", m.erase_radius);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ConfigError, std::string("mapping: ") + e.what());
    }
    validate(m);
    return m;
}

StepResult step_fsm(CommandState state, const Observation& obs, const GestureMapping& mapping) {
    const auto n = static_cast<std::size_t>(mapping.debounce_frames);
    state.buffer.push_back({obs.gesture, obs.confidence});
    while (state.buffer.size() > n) {
        state.buffer.pop_front();
    }

    const bool qualifies = obs.gesture && obs.confidence >= mapping.threshold;
    if (!qualifies) {
        state.streak_gesture.reset();
        state.streak = 0;
    } else if (state.streak_gesture == obs.gesture) {
        ++state.streak;
    } else {
        state.streak_gesture = obs.gesture;
        state.streak = 1;
    }

    if (qualifies && state.streak == mapping.debounce_frames) {
        const CommandEvent ev = transition(state, mapping.command_for(*obs.gesture));
        if (ev.kind != CommandEvent::Kind::None) {
            return {std::move(state), ev};
        }
    }
    const CommandEvent ev = emit_for_mode(state, obs.cursor, obs.t, mapping);
    return {std::move(state), ev};
}

StepResult apply_command(CommandState state, Command cmd, const std::optional<PixelPoint>& cursor,
                         double t, const GestureMapping& mapping) {
    const CommandEvent ev = transition(state, cmd);
    if (ev.kind != CommandEvent::Kind::None) {
        return {std::move(state), ev};
    }
    const CommandEvent follow = emit_for_mode(state, cursor, t, mapping);
    return {std::move(state), follow};
}

} // namespace dronepaint::command
