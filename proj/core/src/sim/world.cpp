#include "dronepaint/sim/world.hpp"

#include "dronepaint/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace dronepaint::sim {

namespace {

const std::array<Rgb, 6> kPalette = {{
    {1.0, 0.25, 0.1},
    {0.1, 0.6, 1.0},
    {0.3, 1.0, 0.3},
    {1.0, 0.9, 0.2},
    {0.9, 0.3, 1.0},
    {1.0, 1.0, 1.0},
}};

constexpr double kJitter = 1e-4;

Vec3 vec3_from_json(const nlohmann::json& j) {
    const auto v = j.get<std::vector<double>>();
    if (v.size() != 3) {
        fail(ErrorCode::ConfigError, "expected a 3-element vector");
    }
    return {v[0], v[1], v[2]};
}

nlohmann::json vec3_to_json(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

} // namespace

std::string_view to_string(FlightStatus s) noexcept {
    switch (s) {
    case FlightStatus::Grounded: return "GROUNDED";
    case FlightStatus::Airborne: return "AIRBORNE";
    case FlightStatus::Landing: return "LANDING";
    }
    return "GROUNDED";
}

std::string_view to_string(SwarmPhase p) noexcept {
    switch (p) {
    case SwarmPhase::Grounded: return "GROUNDED";
    case SwarmPhase::Hold: return "HOLD";
    case SwarmPhase::Approach: return "APPROACH";
    case SwarmPhase::Painting: return "PAINTING";
    case SwarmPhase::Done: return "DONE";
    case SwarmPhase::Landing: return "LANDING";
    }
    return "GROUNDED";
}

Vec3 SimConfig::offset_for(int drone) const {
    if (!offsets.empty()) {
        return offsets.at(static_cast<std::size_t>(drone));
    }
    const double centered = drone - (swarm_size - 1) / 2.0;
    return {centered * formation_spacing, 0.0, 0.0};
}

Rgb SimConfig::color_for(int drone) const {
    if (!led_colors.empty()) {
        return led_colors.at(static_cast<std::size_t>(drone));
    }
    return kPalette[static_cast<std::size_t>(drone) % kPalette.size()];
}

void validate(const SimConfig& c) {
    if (!(c.dt > 0.0) || !(c.tau > 0.0) || !(c.v_max > 0.0)) {
        fail(ErrorCode::ConfigError, "sim: dt, tau and v_max must be positive");
    }
    if (!(c.takeoff_altitude > 0.0) || !(c.arrival_tolerance > 0.0) ||
        !(c.landing_threshold > 0.0) || !(c.approach_timeout >= 0.0)) {
        fail(ErrorCode::ConfigError, "sim: altitudes and tolerances must be positive");
    }
    if (c.swarm_size < 1) {
        fail(ErrorCode::ConfigError, "sim: swarm_size must be >= 1");
    }
    if (!c.offsets.empty() && static_cast<int>(c.offsets.size()) != c.swarm_size) {
        fail(ErrorCode::ConfigError, "sim: one offset per drone required");
    }
    if (!c.led_colors.empty() && static_cast<int>(c.led_colors.size()) != c.swarm_size) {
        fail(ErrorCode::ConfigError, "sim: one LED color per drone required");
    }
    for (int i = 0; i < 3; ++i) {
        if (!(c.bounds_max[i] > c.bounds_min[i])) {
            fail(ErrorCode::ConfigError, "sim: world bounds are degenerate");
        }
    }
    for (int d = 0; d < c.swarm_size; ++d) {
        Vec3 hold = c.offset_for(d);
        hold.z() = c.takeoff_altitude;
        Vec3 home = hold;
        home.z() = 0.0;
        for (const Vec3& p : {hold, home}) {
            if ((p.array() < c.bounds_min.array()).any() || (p.array() > c.bounds_max.array()).any()) {
                fail(ErrorCode::ConfigError, "sim: take-off point of drone " + std::to_string(d) +
                                                 " lies outside the world bounds");
            }
        }
    }
    field::validate(c.field);
    for (const auto& obs : c.obstacles) {
        field::validate(obs);
    }
}

nlohmann::json to_json(const SimConfig& c) {
    nlohmann::json j = {{"dt", c.dt},
                        {"v_max", c.v_max},
                        {"tau", c.tau},
                        {"takeoff_altitude", c.takeoff_altitude},
                        {"bounds", {{"min", vec3_to_json(c.bounds_min)}, {"max", vec3_to_json(c.bounds_max)}}},
                        {"swarm_size", c.swarm_size},
                        {"formation_spacing", c.formation_spacing},
                        {"arrival_based", c.arrival_based},
                        {"arrival_tolerance", c.arrival_tolerance},
                        {"landing_threshold", c.landing_threshold},
                        {"approach_timeout", c.approach_timeout}};
    if (!c.offsets.empty()) {
        auto& arr = j["offsets"] = nlohmann::json::array();
        for (const auto& o : c.offsets) {
            arr.push_back(vec3_to_json(o));
        }
    }
    if (!c.led_colors.empty()) {
        auto& arr = j["led_colors"] = nlohmann::json::array();
        for (const auto& col : c.led_colors) {
            arr.push_back({col.r, col.g, col.b});
        }
    }
    return j;
}

SimConfig sim_from_json(const nlohmann::json& doc, const SimConfig& base) {
    if (!doc.is_object()) {
        fail(ErrorCode::ConfigError, "sim must be an object");
    }
    SimConfig c = base;
    try {
        c.dt = doc.value("dt", c.dt);
        c.v_max = doc.value("v_max", c.v_max);
        c.tau = doc.value("tau", c.tau);
        c.takeoff_altitude = doc.value("takeoff_altitude", c.takeoff_altitude);
        if (doc.contains("bounds")) {
            c.bounds_min = vec3_from_json(doc.at("bounds").at("min"));
            c.bounds_max = vec3_from_json(doc.at("bounds").at("max"));
        }
        if (doc.contains("swarm_size") && !doc.contains("offsets")) {
            c.offsets.clear();
        }
        if (doc.contains("swarm_size") && !doc.contains("led_colors")) {
            c.led_colors.clear();
        }
        c.swarm_size = doc.value("swarm_size", c.swarm_size);
        c.formation_spacing = doc.value("formation_spacing", c.formation_spacing);
        if (doc.contains("offsets")) {
            c.offsets.clear();
            for (const auto& o : doc.at("offsets")) {
                c.offsets.push_back(vec3_from_json(o));
            }
        }
        if (doc.contains("led_colors")) {
            c.led_colors.clear();
            for (const auto& col : doc.at("led_colors")) {
                const auto v = col.get<std::vector<double>>();
                if (v.size() != 3) {
                    fail(ErrorCode::ConfigError, "led color must be [r, g, b]");
                }
                c.led_colors.push_back({v[0], v[1], v[2]});
            }
        }
        c.arrival_based = doc.value("arrival_based", c.arrival_based);
        c.arrival_tolerance = doc.value("arrival_tolerance", c.arrival_tolerance);
        c.landing_threshold = doc.value("landing_threshold", c.landing_threshold);
        c.approach_timeout = doc.value("approach_timeout", c.approach_timeout);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ConfigError, std::string("sim: ") + e.what());
    }
    validate(c);
    return c;
}

std::string to_json_line(const SimEvent& ev) {
    nlohmann::json j = std::visit(
        [](const auto& e) -> nlohmann::json {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, WaypointDispatched>) {
                return {{"event", "WaypointDispatched"}, {"drone", e.drone}, {"index", e.index}, {"t", e.t}};
            } else if constexpr (std::is_same_v<T, GoalReached>) {
                return {{"event", "GoalReached"}, {"drone", e.drone}, {"t", e.t}};
            } else if constexpr (std::is_same_v<T, SeparationViolation>) {
                return {{"event", "SeparationViolation"}, {"pair", {e.a, e.b}}, {"d", e.distance}, {"t", e.t}};
            } else if constexpr (std::is_same_v<T, Landed>) {
                return {{"event", "Landed"}, {"drone", e.drone}, {"t", e.t}};
            } else {
                return {{"event", "Penetration"}, {"drone", e.drone}, {"obstacle", e.obstacle}, {"t", e.t}};
            }
        },
        ev);
    return j.dump();
}

double event_time(const SimEvent& ev) {
    return std::visit([](const auto& e) { return e.t; }, ev);
}

PaintPlan single_run_plan(std::vector<trajectory::TimedWaypoint> schedule) {
    PaintPlan plan;
    plan.lit.assign(schedule.size(), true);
    if (!plan.lit.empty()) {
        plan.lit.front() = false;
    }
    plan.waypoints = std::move(schedule);
    return plan;
}

PaintPlan join_runs(const std::vector<std::vector<trajectory::TimedWaypoint>>& runs, double speed) {
    if (!(speed > 0.0)) {
        fail(ErrorCode::ConfigError, "flight speed must be positive");
    }
    PaintPlan plan;
    for (const auto& run : runs) {
        if (run.empty()) {
            continue;
        }
        double shift = 0.0;
        if (!plan.waypoints.empty()) {
            const auto& last = plan.waypoints.back();
            shift = last.dispatch_offset + (run.front().position - last.position).norm() / speed;
        }
        for (std::size_t k = 0; k < run.size(); ++k) {
            plan.waypoints.push_back({run[k].position, shift + run[k].dispatch_offset});
            plan.lit.push_back(k != 0);
        }
    }
    // Identical consecutive offsets would make the transfer instantaneous; keep
    // offsets strictly increasing.
    for (std::size_t k = 1; k < plan.waypoints.size(); ++k) {
        auto& cur = plan.waypoints[k].dispatch_offset;
        const double prev = plan.waypoints[k - 1].dispatch_offset;
        if (!(cur > prev)) {
            cur = std::nextafter(prev, std::numeric_limits<double>::infinity());
        }
    }
    return plan;
}

std::optional<std::size_t> active_waypoint(std::span<const trajectory::TimedWaypoint> schedule,
                                           double elapsed) {
    const auto it = std::upper_bound(
        schedule.begin(), schedule.end(), elapsed,
        [](double e, const trajectory::TimedWaypoint& w) { return e < w.dispatch_offset; });
    if (it == schedule.begin()) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - schedule.begin() - 1);
}

Vec3 respond(const Vec3& velocity, const Vec3& commanded, double dt, double tau, double v_max) {
    Vec3 v = velocity + (commanded - velocity) * std::min(1.0, dt / tau);
    const double speed = v.norm();
    if (speed > v_max) {
        v *= v_max / speed;
    }
    return v;
}

World::World(SimConfig config) : config_(std::move(config)), rng_(config_.seed) {
    validate(config_);
    const auto n = static_cast<std::size_t>(config_.swarm_size);
    drones_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& d = drones_[i];
        d.id = static_cast<int>(i);
        d.position = hold_point(d.id);
        d.position.z() = 0.0;
        d.target = d.position;
        d.led = config_.color_for(d.id);
    }
    goal_reached_.assign(n, false);
    landing_targets_.assign(n, Vec3::Zero());
    inside_obstacle_.assign(n, std::vector<bool>(config_.obstacles.size(), false));
    violating_.assign(n, std::vector<bool>(n, false));
}

Vec3 World::hold_point(int drone) const {
    Vec3 p = config_.offset_for(drone);
    p.z() = config_.takeoff_altitude;
    return p;
}

PaintProgress World::progress() const {
    return {active_.value_or(0), plan_.waypoints.size(), phase_ == SwarmPhase::Painting};
}

void World::take_off() {
    bool any = false;
    for (auto& d : drones_) {
        if (d.status == FlightStatus::Grounded) {
            d.status = FlightStatus::Airborne;
            d.target = hold_point(d.id);
            any = true;
        }
    }
    if (any && phase_ == SwarmPhase::Grounded) {
        phase_ = SwarmPhase::Hold;
    }
}

void World::land() {
    for (auto& d : drones_) {
        d.led_on = false;
        if (d.status == FlightStatus::Airborne) {
            d.status = FlightStatus::Landing;
            landing_targets_[static_cast<std::size_t>(d.id)] = {d.position.x(), d.position.y(), 0.0};
            d.target = landing_targets_[static_cast<std::size_t>(d.id)];
        }
    }
    plan_ = {};
    active_.reset();
    phase_ = all_grounded() ? SwarmPhase::Grounded : SwarmPhase::Landing;
}

void World::begin_paint(PaintPlan plan) {
    if (plan.empty() || plan.lit.size() != plan.waypoints.size()) {
        fail(ErrorCode::ConfigError, "paint plan is empty or inconsistent");
    }
    if (std::none_of(drones_.begin(), drones_.end(),
                     [](const DroneState& d) { return d.status == FlightStatus::Airborne; })) {
        fail(ErrorCode::ConfigError, "swarm is not airborne");
    }
    plan_ = std::move(plan);
    active_.reset();
    std::fill(goal_reached_.begin(), goal_reached_.end(), false);
    approach_start_ = time_;
    phase_ = SwarmPhase::Approach;
    for (auto& d : drones_) {
        d.led_on = false;
        if (d.status == FlightStatus::Airborne) {
            d.target = plan_.waypoints.front().position + config_.offset_for(d.id);
        }
    }
}

void World::set_goal(int drone, const Vec3& goal) {
    drones_.at(static_cast<std::size_t>(drone)).target = goal;
}

void World::place(int drone, const Vec3& position, FlightStatus status) {
    auto& d = drones_.at(static_cast<std::size_t>(drone));
    d.position = position;
    d.velocity = Vec3::Zero();
    d.status = status;
    d.target = position;
    if (status != FlightStatus::Grounded && phase_ == SwarmPhase::Grounded) {
        phase_ = SwarmPhase::Hold;
    }
}

bool World::all_grounded() const {
    return std::all_of(drones_.begin(), drones_.end(),
                       [](const DroneState& d) { return d.status == FlightStatus::Grounded; });
}

bool World::all_goals_reached() const {
    for (const auto& d : drones_) {
        if (d.status == FlightStatus::Airborne && !goal_reached_[static_cast<std::size_t>(d.id)]) {
            return false;
        }
    }
    return true;
}

bool World::all_within(double tolerance) const {
    return std::all_of(drones_.begin(), drones_.end(), [&](const DroneState& d) {
        return d.status == FlightStatus::Grounded || (d.position - d.target).norm() <= tolerance;
    });
}

void World::dispatch(std::vector<SimEvent>& events) {
    const double tol = config_.arrival_tolerance;
    if (phase_ == SwarmPhase::Approach) {
        if (all_within(tol) || time_ - approach_start_ >= config_.approach_timeout) {
            phase_ = SwarmPhase::Painting;
            paint_start_ = time_;
        } else {
            return;
        }
    }
    if (phase_ != SwarmPhase::Painting) {
        return;
    }

    std::optional<std::size_t> next;
    if (config_.arrival_based) {
        next = active_ ? *active_ : 0;
        if (active_ && *active_ + 1 < plan_.waypoints.size() && all_within(tol)) {
            next = *active_ + 1;
        }
    } else {
        next = active_waypoint(plan_.waypoints, time_ - paint_start_);
    }
    if (!next) {
        return;
    }
    const std::size_t first_new = active_ ? *active_ + 1 : 0;
    for (std::size_t k = first_new; k <= *next; ++k) {
        for (const auto& d : drones_) {
            if (d.status == FlightStatus::Airborne) {
                events.push_back(WaypointDispatched{d.id, k, time_});
            }
        }
    }
    active_ = next;

    const std::size_t last = plan_.waypoints.size() - 1;
    for (auto& d : drones_) {
        if (d.status != FlightStatus::Airborne) {
            continue;
        }
        const auto i = static_cast<std::size_t>(d.id);
        d.target = plan_.waypoints[*active_].position + config_.offset_for(d.id);
        if (*active_ == last && !goal_reached_[i] && (d.position - d.target).norm() <= tol) {
            goal_reached_[i] = true;
            events.push_back(GoalReached{d.id, time_});
        }
        d.led_on = plan_.lit[*active_] && !goal_reached_[i];
    }
    if (*active_ == last && all_goals_reached()) {
        phase_ = SwarmPhase::Done;
        for (auto& d : drones_) {
            d.led_on = false;
        }
    }
}

std::vector<Vec3> World::repulsion_sources(std::size_t i, std::vector<SimEvent>& events) {
    auto& self = drones_[i];
    for (int attempt = 0;; ++attempt) {
        std::vector<Vec3> sources;
        bool coincident = false;
        for (std::size_t j = 0; j < drones_.size(); ++j) {
            if (j == i) {
                continue;
            }
            sources.push_back(drones_[j].position);
            coincident |= drones_[j].position == self.position;
        }
        for (std::size_t k = 0; k < config_.obstacles.size(); ++k) {
            const auto surface = field::nearest_obstacle_point(self.position, config_.obstacles[k]);
            if (attempt == 0) {
                if (surface.penetration && !inside_obstacle_[i][k]) {
                    events.push_back(Penetration{self.id, k, time_});
                }
                inside_obstacle_[i][k] = surface.penetration;
            }
            const Vec3 src = field::repulsion_source(self.position, surface);
            sources.push_back(src);
            coincident |= src == self.position;
        }
        if (!coincident || attempt >= 8) {
            if (coincident) {
                std::erase_if(sources, [&](const Vec3& s) { return s == self.position; });
            }
            return sources;
        }
        std::normal_distribution<double> gauss(0.0, 1.0);
        Vec3 dir(gauss(rng_), gauss(rng_), gauss(rng_));
        if (dir.norm() == 0.0) {
            dir = Vec3::UnitX();
        }
        self.position += kJitter * dir.normalized();
    }
}

std::vector<SimEvent> World::step(double dt) {
    if (!(dt > 0.0)) {
        fail(ErrorCode::ConfigError, "step dt must be positive");
    }
    std::vector<SimEvent> events;
    dispatch(events);

    // Forces for every drone come from the same snapshot of positions.
    std::vector<Vec3> new_pos(drones_.size());
    std::vector<Vec3> new_vel(drones_.size());
    for (std::size_t i = 0; i < drones_.size(); ++i) {
        auto& d = drones_[i];
        if (d.status == FlightStatus::Grounded) {
            new_pos[i] = d.position;
            new_vel[i] = Vec3::Zero();
            continue;
        }
        const auto sources = repulsion_sources(i, events);
        const Vec3 commanded = field::total_force(d.position, d.target, sources, config_.field);
        new_vel[i] = respond(d.velocity, commanded, dt, config_.tau, config_.v_max);
        new_pos[i] = (d.position + new_vel[i] * dt).cwiseMax(config_.bounds_min).cwiseMin(config_.bounds_max);
    }
    time_ += dt;

    for (std::size_t i = 0; i < drones_.size(); ++i) {
        auto& d = drones_[i];
        d.position = new_pos[i];
        d.velocity = new_vel[i];
        if (d.status == FlightStatus::Landing && d.position.z() <= config_.landing_threshold) {
            d.status = FlightStatus::Grounded;
            d.position.z() = 0.0;
            d.velocity = Vec3::Zero();
            d.led_on = false;
            d.target = d.position;
            events.push_back(Landed{d.id, time_});
        }
    }
    if (phase_ == SwarmPhase::Landing && all_grounded()) {
        phase_ = SwarmPhase::Grounded;
    }

    for (std::size_t a = 0; a < drones_.size(); ++a) {
        for (std::size_t b = a + 1; b < drones_.size(); ++b) {
            const bool flying = drones_[a].status != FlightStatus::Grounded &&
                                drones_[b].status != FlightStatus::Grounded;
            const double d = (drones_[a].position - drones_[b].position).norm();
            const bool violating = flying && d < config_.field.d_safe;
            if (violating && !violating_[a][b]) {
                events.push_back(SeparationViolation{drones_[a].id, drones_[b].id, d, time_});
            }
            violating_[a][b] = violating;
        }
    }
    return events;
}

} // namespace dronepaint::sim
