#pragma once

#include "dronepaint/types.hpp"

#include <nlohmann/json_fwd.hpp>

#include <span>
#include <variant>

namespace dronepaint::field {

// Forces are expressed as commanded velocities (m/s).
struct FieldParams {
    double k_att = 1.0;   // 1/s
    double f_max = 0.5;   // m/s, cap on the attractive term
    double k_rep = 0.02;  // m^3/s
    double d0 = 0.6;      // m, influence radius of a repulsive source
    double d_safe = 0.2;  // m, required separation (diagnostics only)

    friend bool operator==(const FieldParams&, const FieldParams&) = default;
};

// Throws ConfigError unless every gain is positive and d_safe < d0.
void validate(const FieldParams& p);

nlohmann::json to_json(const FieldParams& p);
FieldParams field_from_json(const nlohmann::json& doc, const FieldParams& base = {});

struct Sphere {
    Vec3 center = Vec3::Zero();
    double radius = 1.0;
};

// Axis-aligned box; infinite bounds give a wall slab.
struct Slab {
    Vec3 min = Vec3::Zero();
    Vec3 max = Vec3::Zero();
};

using Obstacle = std::variant<Sphere, Slab>;

void validate(const Obstacle& obs);

nlohmann::json to_json(const Obstacle& obs);
Obstacle obstacle_from_json(const nlohmann::json& doc);

struct SurfacePoint {
    Vec3 point = Vec3::Zero();
    bool penetration = false; // the query position was inside the obstacle
};

SurfacePoint nearest_obstacle_point(const Vec3& pos, const Obstacle& obs);

// The point a repulsive term should push away from. For a penetrating query the
// surface point is mirrored through `pos`, so the push points outwards.
Vec3 repulsion_source(const Vec3& pos, const SurfacePoint& surface);

// k_att * (goal - pos), magnitude capped at f_max.
Vec3 attractive_force(const Vec3& pos, const Vec3& goal, const FieldParams& p);

// Sum over sources closer than d0 of k_rep (1/d - 1/d0) / d^2 along (pos - source)/d.
// Throws CoincidentSource when a source sits exactly at pos.
Vec3 repulsive_force(const Vec3& pos, std::span<const Vec3> sources, const FieldParams& p);

Vec3 total_force(const Vec3& pos, const Vec3& goal, std::span<const Vec3> sources,
                 const FieldParams& p);

} // namespace dronepaint::field
