#pragma once

#include "dronepaint/gesture/hand.hpp"

#include <nlohmann/json_fwd.hpp>

#include <array>
#include <deque>
#include <optional>
#include <string_view>

namespace dronepaint::command {

using gesture::GestureClass;
using gesture::PixelPoint;

enum class Mode { Grounded, FlyingIdle, Drawing, Erasing, Painting };

// What a gesture (or a UI button) asks for.
enum class Command { None, TakeOff, Land, Draw, Erase, BeginPaint, Idle, Clear };

std::string_view to_string(Mode mode) noexcept;
std::string_view to_string(Command cmd) noexcept;
std::optional<Command> command_from_string(std::string_view name) noexcept;

struct CommandEvent {
    enum class Kind { None, TakeOff, Land, DrawPoint, EraseAt, BeginPaint, Clear };

    Kind kind = Kind::None;
    double x = 0.0;      // DrawPoint / EraseAt, pixels
    double y = 0.0;
    double t = 0.0;      // DrawPoint
    double radius = 0.0; // EraseAt, pixels

    friend bool operator==(const CommandEvent&, const CommandEvent&) = default;
};

std::string_view to_string(CommandEvent::Kind kind) noexcept;

struct GestureMapping {
    std::array<Command, gesture::kGestureCount> commands{};
    double threshold = 0.8;
    int debounce_frames = 5;
    double erase_radius = 30.0;

    Command command_for(GestureClass g) const { return commands[gesture::index_of(g)]; }

    friend bool operator==(const GestureMapping&, const GestureMapping&) = default;
};

// THUMBS_UP take off, OKAY land, ONE draw, TWO erase, ROCK paint, FIVE idle;
// THREE and FOUR unassigned. threshold 0.8, 5 frames, erase radius 30 px.
GestureMapping default_mapping();

// Throws ConfigError: threshold outside [0,1], debounce < 1, radius <= 0, or two
// gestures mapped to the same command.
void validate(const GestureMapping& mapping);

nlohmann::json to_json(const GestureMapping& mapping);
// Missing keys keep the values of `base`.
GestureMapping mapping_from_json(const nlohmann::json& doc, const GestureMapping& base = default_mapping());

struct DebounceEntry {
    std::optional<GestureClass> gesture;
    double confidence = 0.0;
};

struct CommandState {
    Mode mode = Mode::Grounded;
    std::deque<DebounceEntry> buffer; // most recent last, at most N entries
    std::optional<GestureClass> streak_gesture;
    int streak = 0;
    std::optional<double> last_draw_t;
};

// One processed camera frame; `gesture` and `cursor` are empty when no hand is visible.
struct Observation {
    std::optional<GestureClass> gesture;
    double confidence = 0.0;
    std::optional<PixelPoint> cursor;
    double t = 0.0;
};

struct StepResult {
    CommandState state;
    CommandEvent event;
};

// A gesture fires its command on the frame where it completes N consecutive
// frames at confidence >= threshold; it does not fire again until the streak
// breaks. DRAWING emits a DrawPoint per frame with a cursor (strictly increasing
// timestamps, repeats are dropped), ERASING an EraseAt.
StepResult step_fsm(CommandState state, const Observation& obs, const GestureMapping& mapping);

// Applies a command immediately, bypassing the debounce; used for UI buttons.
StepResult apply_command(CommandState state, Command cmd, const std::optional<PixelPoint>& cursor,
                         double t, const GestureMapping& mapping);

} // namespace dronepaint::command
