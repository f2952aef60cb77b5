#pragma once

#include "dronepaint/field/potential_field.hpp"
#include "dronepaint/trajectory/pipeline.hpp"
#include "dronepaint/types.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace dronepaint::sim {

enum class FlightStatus { Grounded, Airborne, Landing };

std::string_view to_string(FlightStatus s) noexcept;

struct DroneState {
    int id = 0;
    Vec3 position = Vec3::Zero();
    Vec3 velocity = Vec3::Zero();
    Rgb led{1.0, 1.0, 1.0};
    bool led_on = false;
    FlightStatus status = FlightStatus::Grounded;
    Vec3 target = Vec3::Zero(); // current attraction goal
};

struct SimConfig {
    double dt = 0.01;
    double v_max = 0.5;
    double tau = 0.3;
    double takeoff_altitude = 1.0;
    Vec3 bounds_min{-3.0, -3.0, 0.0};
    Vec3 bounds_max{3.0, 3.0, 3.0};
    int swarm_size = 3;
    std::vector<Vec3> offsets;   // per drone; empty = line abreast along x
    double formation_spacing = 0.5;
    std::vector<Rgb> led_colors; // per drone; empty = default palette
    std::uint64_t seed = 0;
    bool arrival_based = false;  // advance waypoints on arrival instead of on schedule
    double arrival_tolerance = 0.05;
    double landing_threshold = 0.02;
    double approach_timeout = 20.0;
    field::FieldParams field;
    std::vector<field::Obstacle> obstacles;

    Vec3 offset_for(int drone) const;
    Rgb color_for(int drone) const;
};

// Throws ConfigError: dt/tau/v_max not positive, swarm_size < 1, offsets or
// colors count mismatched, bounds not containing the take-off points.
void validate(const SimConfig& c);

nlohmann::json to_json(const SimConfig& c);
// Reads dt, v_max, tau, takeoff_altitude, bounds, swarm, arrival flags; field
// and obstacles are handled by their own keys in the caller's document.
SimConfig sim_from_json(const nlohmann::json& doc, const SimConfig& base = {});

struct WaypointDispatched {
    int drone;
    std::size_t index;
    double t;
};
struct GoalReached {
    int drone;
    double t;
};
struct SeparationViolation {
    int a;
    int b;
    double distance;
    double t;
};
struct Landed {
    int drone;
    double t;
};
struct Penetration {
    int drone;
    std::size_t obstacle;
    double t;
};

using SimEvent = std::variant<WaypointDispatched, GoalReached, SeparationViolation, Landed, Penetration>;

std::string to_json_line(const SimEvent& ev);
double event_time(const SimEvent& ev);

// A trajectory for the swarm: waypoints plus whether the segment leading to
// each waypoint is painted (false on transfers between runs).
struct PaintPlan {
    std::vector<trajectory::TimedWaypoint> waypoints;
    std::vector<bool> lit;

    bool empty() const { return waypoints.empty(); }
    double duration() const { return waypoints.empty() ? 0.0 : waypoints.back().dispatch_offset; }
};

PaintPlan single_run_plan(std::vector<trajectory::TimedWaypoint> schedule);
// Concatenates runs; the transfer from the end of one run to the start of the
// next takes gap / speed seconds with the light off.
PaintPlan join_runs(const std::vector<std::vector<trajectory::TimedWaypoint>>& runs, double speed);

// Index of the latest waypoint with dispatch_offset <= elapsed; empty before the first.
std::optional<std::size_t> active_waypoint(std::span<const trajectory::TimedWaypoint> schedule,
                                           double elapsed);

// First-order velocity response followed by the speed cap.
Vec3 respond(const Vec3& velocity, const Vec3& commanded, double dt, double tau, double v_max);

enum class SwarmPhase { Grounded, Hold, Approach, Painting, Done, Landing };
std::string_view to_string(SwarmPhase p) noexcept;

struct PaintProgress {
    std::size_t index = 0;
    std::size_t total = 0;
    bool painting = false;
};

// Fixed-timestep kinematic swarm. Single writer: every mutation goes through
// the member functions, consumers copy `drones()` for snapshots.
class World {
public:
    explicit World(SimConfig config);

    const SimConfig& config() const { return config_; }
    double time() const { return time_; }
    std::span<const DroneState> drones() const { return drones_; }
    SwarmPhase phase() const { return phase_; }
    PaintProgress progress() const;
    const PaintPlan& plan() const { return plan_; }

    Vec3 hold_point(int drone) const;

    void take_off();
    void land();
    // Flies to the first waypoint with the light off, then starts the schedule clock.
    void begin_paint(PaintPlan plan);
    // Overrides the goal of one airborne drone (scripted scenarios).
    void set_goal(int drone, const Vec3& goal);
    void place(int drone, const Vec3& position, FlightStatus status);

    // Advances one step of `dt` seconds and returns the events it produced.
    std::vector<SimEvent> step(double dt);
    std::vector<SimEvent> step() { return step(config_.dt); }

    bool all_grounded() const;
    bool all_goals_reached() const;
    bool all_within(double tolerance) const; // every airborne drone near its target

private:
    void dispatch(std::vector<SimEvent>& events);
    std::vector<Vec3> repulsion_sources(std::size_t i, std::vector<SimEvent>& events);

    SimConfig config_;
    std::vector<DroneState> drones_;
    double time_ = 0.0;
    SwarmPhase phase_ = SwarmPhase::Grounded;
    PaintPlan plan_;
    std::optional<std::size_t> active_;
    double paint_start_ = 0.0;
    double approach_start_ = 0.0;
    std::vector<bool> goal_reached_;
    std::vector<Vec3> landing_targets_;
    std::vector<std::vector<bool>> inside_obstacle_;
    std::vector<std::vector<bool>> violating_;
    std::mt19937_64 rng_;
};

} // namespace dronepaint::sim
