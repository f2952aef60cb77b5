#include "dronepaint/field/potential_field.hpp"

#include "dronepaint/error.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <limits>
#include <string>

namespace dronepaint::field {

void validate(const FieldParams& p) {
    if (!(p.k_att > 0.0) || !(p.f_max > 0.0) || !(p.k_rep > 0.0) || !(p.d0 > 0.0) ||
        !(p.d_safe > 0.0)) {
        fail(ErrorCode::ConfigError, "field parameters must be positive");
    }
    if (!(p.d_safe < p.d0)) {
        fail(ErrorCode::ConfigError, "field: d_safe must be smaller than d0");
    }
}

nlohmann::json to_json(const FieldParams& p) {
    return {{"k_att", p.k_att}, {"f_max", p.f_max}, {"k_rep", p.k_rep}, {"d0", p.d0},
            {"d_safe", p.d_safe}};
}

FieldParams field_from_json(const nlohmann::json& doc, const FieldParams& base) {
    if (!doc.is_object()) {
        fail(ErrorCode::ConfigError, "field must be an object");
    }
    FieldParams p = base;
    try {
        p.k_att = doc.value("k_att", p.k_att);
        p.f_max = doc.value("f_max", p.f_max);
        p.k_rep = doc.value("k_rep", p.k_rep);
        p.d0 = doc.value("d0", p.d0);
        p.d_safe = doc.value("d_safe", p.d_safe);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ConfigError, std::string("field: ") + e.what());
    }
    validate(p);
    return p;
}

void validate(const Obstacle& obs) {
    if (const auto* s = std::get_if<Sphere>(&obs)) {
        if (!(s->radius > 0.0) || !s->center.allFinite()) {
            fail(ErrorCode::ConfigError, "sphere obstacle needs a finite center and positive radius");
        }
    } else {
        const auto& b = std::get<Slab>(obs);
        for (int i = 0; i < 3; ++i) {
            if (!(b.max[i] > b.min[i])) {
                fail(ErrorCode::ConfigError, "slab obstacle bounds are degenerate");
            }
        }
    }
}

namespace {

nlohmann::json bound_to_json(const Vec3& v) {
    auto j = nlohmann::json::array();
    for (int i = 0; i < 3; ++i) {
        if (std::isinf(v[i])) {
            j.push_back(nullptr);
        } else {
            j.push_back(v[i]);
        }
    }
    return j;
}

// null entries stand for an unbounded axis.
Vec3 bound_from_json(const nlohmann::json& j, double unbounded) {
    if (!j.is_array() || j.size() != 3) {
        fail(ErrorCode::ConfigError, "slab bounds must be 3-element arrays");
    }
    Vec3 v;
    for (int i = 0; i < 3; ++i) {
        v[i] = j[static_cast<std::size_t>(i)].is_null() ? unbounded : j[static_cast<std::size_t>(i)].get<double>();
    }
    return v;
}

Vec3 vec_from_json(const nlohmann::json& j) {
    const auto v = j.get<std::vector<double>>();
    if (v.size() != 3) {
        fail(ErrorCode::ConfigError, "expected a 3-element vector");
    }
    return {v[0], v[1], v[2]};
}

} // namespace

nlohmann::json to_json(const Obstacle& obs) {
    if (const auto* s = std::get_if<Sphere>(&obs)) {
        return {{"sphere",
                 {{"center", {s->center.x(), s->center.y(), s->center.z()}}, {"radius", s->radius}}}};
    }
    const auto& b = std::get<Slab>(obs);
    return {{"slab", {{"min", bound_to_json(b.min)}, {"max", bound_to_json(b.max)}}}};
}

Obstacle obstacle_from_json(const nlohmann::json& doc) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    Obstacle obs;
    try {
        if (doc.contains("sphere")) {
            const auto& s = doc.at("sphere");
            obs = Sphere{vec_from_json(s.at("center")), s.at("radius").get<double>()};
        } else if (doc.contains("slab")) {
            const auto& s = doc.at("slab");
            obs = Slab{bound_from_json(s.at("min"), -inf), bound_from_json(s.at("max"), inf)};
        } else {
            fail(ErrorCode::ConfigError, "obstacle must be a sphere or a slab");
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ConfigError, std::string("obstacle: ") + e.what());
    }
    validate(obs);
    return obs;
}

SurfacePoint nearest_obstacle_point(const Vec3& pos, const Obstacle& obs) {
    if (const auto* s = std::get_if<Sphere>(&obs)) {
        Vec3 dir = pos - s->center;
        const double d = dir.norm();
        if (d == 0.0) {
            // Any surface point is nearest; pick +x deterministically.
            return {s->center + Vec3(s->radius, 0.0, 0.0), true};
        }
        return {s->center + dir * (s->radius / d), d < s->radius};
    }

    const auto& b = std::get<Slab>(obs);
    const Vec3 clamped = pos.cwiseMax(b.min).cwiseMin(b.max);
    if (clamped != pos) {
        return {clamped, false};
    }
    // Inside (or on the boundary): project onto the closest face.
    Vec3 out = pos;
    double best = std::numeric_limits<double>::infinity();
    int axis = 0;
    double face = pos.x();
    for (int i = 0; i < 3; ++i) {
        const double to_min = pos[i] - b.min[i];
        const double to_max = b.max[i] - pos[i];
        if (to_min < best) {
            best = to_min;
            axis = i;
            face = b.min[i];
        }
        if (to_max < best) {
            best = to_max;
            axis = i;
            face = b.max[i];
        }
    }
    out[axis] = face;
    return {out, best > 0.0};
}

Vec3 repulsion_source(const Vec3& pos, const SurfacePoint& surface) {
    return surface.penetration ? Vec3(2.0 * pos - surface.point) : surface.point;
}

Vec3 attractive_force(const Vec3& pos, const Vec3& goal, const FieldParams& p) {
    Vec3 f = p.k_att * (goal - pos);
    const double mag = f.norm();
    if (mag > p.f_max) {
        f *= p.f_max / mag;
    }
    return f;
}

Vec3 repulsive_force(const Vec3& pos, std::span<const Vec3> sources, const FieldParams& p) {
    Vec3 total = Vec3::Zero();
    for (const auto& src : sources) {
        const Vec3 away = pos - src;
        const double d = away.norm();
        if (d == 0.0) {
            fail(ErrorCode::CoincidentSource, "repulsive source coincides with the position");
        }
        if (d >= p.d0) {
            continue;
        }
        const double mag = p.k_rep * (1.0 / d - 1.0 / p.d0) / (d * d);
        total += (mag / d) * away;
    }
    return total;
}

Vec3 total_force(const Vec3& pos, const Vec3& goal, std::span<const Vec3> sources,
                 const FieldParams& p) {
    return attractive_force(pos, goal, p) + repulsive_force(pos, sources, p);
}

} // namespace dronepaint::field
