#include "dronepaint/command/fsm.hpp"
#include "dronepaint/error.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <random>
#include <set>

namespace dp = dronepaint;
namespace c = dronepaint::command;
using dronepaint::gesture::GestureClass;
using K = c::CommandEvent::Kind;

namespace {

c::Observation see(GestureClass g, double conf, double t, std::optional<dp::gesture::PixelPoint> cursor = {}) {
    return {g, conf, cursor, t};
}

struct Run {
    c::CommandState state;
    std::vector<c::CommandEvent> events;
};

Run feed(c::CommandState state, const std::vector<c::Observation>& obs, const c::GestureMapping& m) {
    Run run;
    for (const auto& o : obs) {
        auto r = c::step_fsm(state, o, m);
        state = r.state;
        run.events.push_back(r.event);
    }
    run.state = state;
    return run;
}

std::vector<c::Observation> hold(GestureClass g, int frames, double t0, double conf = 0.99,
                                 std::optional<dp::gesture::PixelPoint> cursor = {}) {
    std::vector<c::Observation> out;
    for (int i = 0; i < frames; ++i) {
        out.push_back(see(g, conf, t0 + i / 30.0, cursor));
    }
    return out;
}

c::CommandState airborne_state(c::Mode mode) {
    c::CommandState s;
    s.mode = mode;
    return s;
}

} // namespace

TEST(Fsm, ThumbsUpHeldFiveFramesTakesOff) {
    const auto m = c::default_mapping();
    const auto run = feed({}, hold(GestureClass::ThumbsUp, 5, 0.0), m);
    EXPECT_EQ(run.state.mode, c::Mode::FlyingIdle);
    for (int i = 0; i < 4; ++i) {
        EXPECT_EQ(run.events[i].kind, K::None);
    }
    EXPECT_EQ(run.events[4].kind, K::TakeOff);
}

TEST(Fsm, HeldGestureFiresOnce) {
    const auto m = c::default_mapping();
    const auto run = feed({}, hold(GestureClass::ThumbsUp, 30, 0.0), m);
    int fired = 0;
    for (const auto& e : run.events) {
        fired += e.kind == K::TakeOff;
    }
    EXPECT_EQ(fired, 1);
}

TEST(Fsm, FlickerBelowDebounceEmitsNothing) {
    const auto m = c::default_mapping();
    auto obs = hold(GestureClass::ThumbsUp, 4, 0.0);
    obs.push_back(see(GestureClass::Three, 0.99, 0.2));
    auto more = hold(GestureClass::ThumbsUp, 4, 0.3);
    obs.insert(obs.end(), more.begin(), more.end());
    const auto run = feed({}, obs, m);
    EXPECT_EQ(run.state.mode, c::Mode::Grounded);
    for (const auto& e : run.events) {
        EXPECT_EQ(e.kind, K::None);
    }
}

TEST(Fsm, LowConfidenceBreaksStreak) {
    const auto m = c::default_mapping();
    auto obs = hold(GestureClass::ThumbsUp, 4, 0.0);
    obs.push_back(see(GestureClass::ThumbsUp, 0.79, 0.2));
    obs.push_back(see(GestureClass::ThumbsUp, 0.99, 0.25));
    const auto run = feed({}, obs, m);
    EXPECT_EQ(run.state.mode, c::Mode::Grounded);
}

TEST(Fsm, DrawingEmitsCursorPoints) {
    const auto m = c::default_mapping();
    const auto run = feed(airborne_state(c::Mode::Drawing),
                          {see(GestureClass::One, 0.95, 1.0, dp::gesture::PixelPoint{320, 240})}, m);
    ASSERT_EQ(run.events.size(), 1u);
    EXPECT_EQ(run.events[0], (c::CommandEvent{K::DrawPoint, 320, 240, 1.0, 0.0}));
}

TEST(Fsm, DrawGestureEntersDrawingAndStartsEmitting) {
    const auto m = c::default_mapping();
    const auto run = feed(airborne_state(c::Mode::FlyingIdle),
                          hold(GestureClass::One, 7, 0.0, 0.99, dp::gesture::PixelPoint{10, 20}), m);
    EXPECT_EQ(run.state.mode, c::Mode::Drawing);
    for (int i = 0; i < 4; ++i) {
        EXPECT_EQ(run.events[i].kind, K::None);
    }
    for (int i = 4; i < 7; ++i) {
        EXPECT_EQ(run.events[i].kind, K::DrawPoint);
    }
}

TEST(Fsm, ErasingEmitsEraseAtWithRadius) {
    const auto m = c::default_mapping();
    const auto run = feed(airborne_state(c::Mode::Erasing), {see(GestureClass::Two, 0.9, 0.5, dp::gesture::PixelPoint{5, 6})}, m);
    EXPECT_EQ(run.events[0], (c::CommandEvent{K::EraseAt, 5, 6, 0.5, 30.0}));
}

TEST(Fsm, FiveInDrawingReturnsToIdleSilently) {
    const auto m = c::default_mapping();
    const auto run = feed(airborne_state(c::Mode::Drawing), hold(GestureClass::Five, 5, 0.0), m);
    EXPECT_EQ(run.state.mode, c::Mode::FlyingIdle);
    for (const auto& e : run.events) {
        EXPECT_EQ(e.kind, K::None);
    }
}

TEST(Fsm, LandFromEveryAirborneMode) {
    const auto m = c::default_mapping();
    for (auto mode : {c::Mode::FlyingIdle, c::Mode::Drawing, c::Mode::Erasing, c::Mode::Painting}) {
        const auto run = feed(airborne_state(mode), hold(GestureClass::Okay, 5, 0.0), m);
        EXPECT_EQ(run.state.mode, c::Mode::Grounded);
        EXPECT_EQ(run.events.back().kind, K::Land);
    }
}

TEST(Fsm, TakeOffOnlyFromGrounded) {
    const auto m = c::default_mapping();
    const auto run = feed(airborne_state(c::Mode::Drawing), hold(GestureClass::ThumbsUp, 5, 0.0), m);
    EXPECT_EQ(run.state.mode, c::Mode::Drawing);
    for (const auto& e : run.events) {
        EXPECT_NE(e.kind, K::TakeOff);
    }
}

TEST(Fsm, BeginPaint) {
    const auto m = c::default_mapping();
    const auto run = feed(airborne_state(c::Mode::FlyingIdle), hold(GestureClass::Rock, 5, 0.0), m);
    EXPECT_EQ(run.state.mode, c::Mode::Painting);
    EXPECT_EQ(run.events.back().kind, K::BeginPaint);
}

TEST(Fsm, BufferNeverExceedsN) {
    auto m = c::default_mapping();
    m.debounce_frames = 3;
    c::CommandState s;
    for (int i = 0; i < 20; ++i) {
        s = c::step_fsm(s, see(GestureClass::Four, 0.5, i), m).state;
        EXPECT_LE(s.buffer.size(), 3u);
    }
}

TEST(Fsm, DuplicateTimestampsDropDrawPoints) {
    const auto m = c::default_mapping();
    const auto cur = dp::gesture::PixelPoint{1, 1};
    const auto run = feed(airborne_state(c::Mode::Drawing),
                          {see(GestureClass::One, 0.9, 1.0, cur), see(GestureClass::One, 0.9, 1.0, cur),
                           see(GestureClass::One, 0.9, 0.5, cur), see(GestureClass::One, 0.9, 1.1, cur)},
                          m);
    EXPECT_EQ(run.events[0].kind, K::DrawPoint);
    EXPECT_EQ(run.events[1].kind, K::None);
    EXPECT_EQ(run.events[2].kind, K::None);
    EXPECT_EQ(run.events[3].kind, K::DrawPoint);
}

TEST(Fsm, NoHandMeansNoDrawing) {
    const auto m = c::default_mapping();
    c::Observation nothing;
    nothing.t = 1.0;
    const auto r = c::step_fsm(airborne_state(c::Mode::Drawing), nothing, m);
    EXPECT_EQ(r.event.kind, K::None);
    EXPECT_EQ(r.state.mode, c::Mode::Drawing);
}

// Reference model of the debounce, written independently of the library: a
// command may only fire on a frame closing a run of exactly N qualifying
// frames of one gesture.
TEST(FsmProperty, RandomStreamsRespectDebounceAndModes) {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 300; ++trial) {
        auto m = c::default_mapping();
        m.debounce_frames = 1 + static_cast<int>(rng() % 6);
        m.threshold = std::uniform_real_distribution<double>(0.3, 0.95)(rng);
        c::CommandState s;
        std::vector<c::Observation> history;
        std::optional<double> last_draw;
        double t = 0.0;
        std::uniform_int_distribution<int> gpick(0, 7);
        std::uniform_real_distribution<double> conf(0.0, 1.0);
        GestureClass sticky = GestureClass::One;
        for (int frame = 0; frame < 400; ++frame) {
            if (rng() % 4 == 0) {
                sticky = static_cast<GestureClass>(gpick(rng));
            }
            t += (rng() % 10 == 0) ? 0.0 : 1.0 / 30.0;
            c::Observation o{sticky, conf(rng) < 0.2 ? 0.1 : 0.95, dp::gesture::PixelPoint{1.0 * frame, 2.0}, t};
            if (rng() % 15 == 0) {
                o.gesture.reset();
                o.cursor.reset();
            }
            history.push_back(o);
            const c::Mode before = s.mode;
            const auto r = c::step_fsm(s, o, m);
            s = r.state;

            const bool mode_changed = s.mode != before;
            const bool command_event = r.event.kind == K::TakeOff || r.event.kind == K::Land ||
                                       r.event.kind == K::BeginPaint || r.event.kind == K::Clear;
            if (mode_changed || command_event) {
                const int n = m.debounce_frames;
                ASSERT_GE(static_cast<int>(history.size()), n);
                for (int k = 0; k < n; ++k) {
                    const auto& h = history[history.size() - 1 - static_cast<std::size_t>(k)];
                    ASSERT_TRUE(h.gesture.has_value());
                    EXPECT_EQ(*h.gesture, *o.gesture);
                    EXPECT_GE(h.confidence, m.threshold);
                }
                if (static_cast<int>(history.size()) > n) {
                    const auto& prev = history[history.size() - 1 - static_cast<std::size_t>(n)];
                    const bool prev_qualifies = prev.gesture == o.gesture && prev.confidence >= m.threshold;
                    EXPECT_FALSE(prev_qualifies) << "fired on a run longer than N";
                }
            }
            if (before == c::Mode::Grounded && mode_changed) {
                EXPECT_EQ(r.event.kind, K::TakeOff);
                EXPECT_EQ(s.mode, c::Mode::FlyingIdle);
            }
            if (r.event.kind == K::DrawPoint) {
                EXPECT_EQ(s.mode, c::Mode::Drawing);
                if (last_draw) {
                    EXPECT_GT(r.event.t, *last_draw);
                }
                last_draw = r.event.t;
            }
        }
    }
}

TEST(FsmProperty, Deterministic) {
    std::mt19937_64 rng(9);
    std::vector<c::Observation> obs;
    for (int i = 0; i < 500; ++i) {
        obs.push_back({static_cast<GestureClass>(rng() % 8), 0.5 + 0.5 * (rng() % 2), dp::gesture::PixelPoint{1.0 * i, 1.0}, i / 30.0});
    }
    const auto m = c::default_mapping();
    const auto a = feed({}, obs, m);
    const auto b = feed({}, obs, m);
    EXPECT_EQ(a.events, b.events);
    EXPECT_EQ(a.state.mode, b.state.mode);
}

TEST(Mapping, DefaultAssignment) {
    const auto m = c::default_mapping();
    EXPECT_EQ(m.command_for(GestureClass::ThumbsUp), c::Command::TakeOff);
    EXPECT_EQ(m.command_for(GestureClass::Okay), c::Command::Land);
    EXPECT_EQ(m.command_for(GestureClass::One), c::Command::Draw);
    EXPECT_EQ(m.command_for(GestureClass::Two), c::Command::Erase);
    EXPECT_EQ(m.command_for(GestureClass::Rock), c::Command::BeginPaint);
    EXPECT_EQ(m.command_for(GestureClass::Five), c::Command::Idle);
    EXPECT_EQ(m.command_for(GestureClass::Three), c::Command::None);
    EXPECT_EQ(m.command_for(GestureClass::Four), c::Command::None);
    EXPECT_DOUBLE_EQ(m.threshold, 0.8);
    EXPECT_EQ(m.debounce_frames, 5);
    EXPECT_DOUBLE_EQ(m.erase_radius, 30.0);
    std::set<c::Command> seen;
    for (auto cmd : m.commands) {
        if (cmd != c::Command::None) {
            EXPECT_TRUE(seen.insert(cmd).second);
        }
    }
    EXPECT_NO_THROW(c::validate(m));
}

TEST(Mapping, JsonRoundTrip) {
    auto m = c::default_mapping();
    m.threshold = 0.65;
    m.debounce_frames = 3;
    m.commands[dp::gesture::index_of(GestureClass::Three)] = c::Command::Clear;
    const auto back = c::mapping_from_json(c::to_json(m));
    EXPECT_EQ(back, m);
    EXPECT_EQ(c::mapping_from_json(nlohmann::json::object()), c::default_mapping());
}

TEST(Mapping, ValidationErrors) {
    auto dup = c::default_mapping();
    dup.commands[dp::gesture::index_of(GestureClass::Three)] = c::Command::TakeOff;
    EXPECT_THROW(c::validate(dup), dp::Error);
    auto bad = c::default_mapping();
    bad.threshold = 1.2;
    EXPECT_THROW(c::validate(bad), dp::Error);
    bad = c::default_mapping();
    bad.debounce_frames = 0;
    EXPECT_THROW(c::validate(bad), dp::Error);
    EXPECT_THROW(c::mapping_from_json(nlohmann::json{{"gestures", {{"SIX", "LAND"}}}}), dp::Error);
}

TEST(ApplyCommand, BypassesDebounce) {
    const auto m = c::default_mapping();
    auto r = c::apply_command({}, c::Command::TakeOff, std::nullopt, 0.0, m);
    EXPECT_EQ(r.state.mode, c::Mode::FlyingIdle);
    EXPECT_EQ(r.event.kind, K::TakeOff);
    r = c::apply_command(r.state, c::Command::Draw, dp::gesture::PixelPoint{3, 4}, 0.1, m);
    EXPECT_EQ(r.state.mode, c::Mode::Drawing);
    EXPECT_EQ(r.event, (c::CommandEvent{K::DrawPoint, 3, 4, 0.1, 0.0}));
    r = c::apply_command(r.state, c::Command::Clear, std::nullopt, 0.2, m);
    EXPECT_EQ(r.event.kind, K::Clear);
    EXPECT_EQ(r.state.mode, c::Mode::Drawing);
    const auto grounded = c::apply_command({}, c::Command::Clear, std::nullopt, 0.0, m);
    EXPECT_EQ(grounded.event.kind, K::None);
    EXPECT_EQ(grounded.state.mode, c::Mode::Grounded);
}

TEST(Names, CommandsRoundTrip) {
    for (auto name : {"TAKE_OFF", "LAND", "DRAW", "ERASE", "BEGIN_PAINT", "IDLE", "CLEAR"}) {
        const auto cmd = c::command_from_string(name);
        ASSERT_TRUE(cmd.has_value()) << name;
        EXPECT_EQ(c::to_string(*cmd), name);
    }
    EXPECT_FALSE(c::command_from_string("FLY").has_value());
}
