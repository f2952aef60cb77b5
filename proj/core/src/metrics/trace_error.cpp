#include "dronepaint/metrics/trace_error.hpp"

#include "dronepaint/error.hpp"
#include "dronepaint/metrics/statistics.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <vector>

namespace dronepaint::metrics {

std::string_view to_string(ShapeKind k) noexcept {
    switch (k) {
    case ShapeKind::Square: return "square";
    case ShapeKind::Circle: return "circle";
    case ShapeKind::Triangle: return "triangle";
    }
    return "square";
}

std::optional<ShapeKind> shape_from_string(std::string_view name) noexcept {
    for (ShapeKind k : {ShapeKind::Square, ShapeKind::Circle, ShapeKind::Triangle}) {
        if (to_string(k) == name) {
            return k;
        }
    }
    return std::nullopt;
}

void validate(const GroundTruthShape& s) {
    if (!(s.size > 0.0) || !std::isfinite(s.size)) {
        fail(ErrorCode::ConfigError, "shape size must be positive");
    }
    if (!s.center.allFinite()) {
        fail(ErrorCode::ConfigError, "shape center must be finite");
    }
}

Polyline2 GroundTruthShape::polyline() const {
    validate(*this);
    Polyline2 out;
    switch (kind) {
    case ShapeKind::Square: {
        const double h = 0.5 * size;
        out = {center + Vec2(-h, h), center + Vec2(h, h), center + Vec2(h, -h), center + Vec2(-h, -h)};
        break;
    }
    case ShapeKind::Circle: {
        constexpr int kVertices = 720;
        out.reserve(kVertices + 1);
        for (int k = 0; k < kVertices; ++k) {
            const double a = 2.0 * std::numbers::pi * k / kVertices;
            out.emplace_back(center + size * Vec2(std::cos(a), std::sin(a)));
        }
        break;
    }
    case ShapeKind::Triangle: {
        const double r = size / std::sqrt(3.0);
        for (double deg : {90.0, 210.0, 330.0}) {
            const double a = deg * std::numbers::pi / 180.0;
            out.emplace_back(center + r * Vec2(std::cos(a), std::sin(a)));
        }
        break;
    }
    }
    out.push_back(out.front());
    return out;
}

nlohmann::json to_json(const GroundTruthShape& s) {
    nlohmann::json doc{{"kind", to_string(s.kind)}, {"center", {s.center.x(), s.center.y()}}};
    doc[s.kind == ShapeKind::Circle ? "radius" : "side"] = s.size;
    return doc;
}

GroundTruthShape shape_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) {
        fail(ErrorCode::ConfigError, "shape must be an object");
    }
    GroundTruthShape s;
    const auto kind = shape_from_string(doc.value("kind", std::string{}));
    if (!kind) {
        fail(ErrorCode::ConfigError, "unknown shape kind");
    }
    s.kind = *kind;
    s.size = *kind == ShapeKind::Circle ? 0.5 : 1.0;
    const char* size_key = *kind == ShapeKind::Circle ? "radius" : "side";
    try {
        if (doc.contains(size_key)) {
            s.size = doc.at(size_key).get<double>();
        }
        if (doc.contains("center")) {
            const auto& c = doc.at("center");
            if (!c.is_array() || c.size() != 2) {
                fail(ErrorCode::ConfigError, "shape center must be [x, z]");
            }
            s.center = Vec2(c[0].get<double>(), c[1].get<double>());
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ConfigError, std::string("shape: ") + e.what());
    }
    validate(s);
    return s;
}

double point_to_polyline(const Vec2& p, std::span<const Vec2> poly) {
    if (poly.size() < 2) {
        fail(ErrorCode::ConfigError, "polyline needs at least 2 points");
    }
    double best = std::numeric_limits<double>::infinity();
    double length = 0.0;
    for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
        const Vec2 a = poly[i];
        const Vec2 ab = poly[i + 1] - a;
        const double len2 = ab.squaredNorm();
        length += std::sqrt(len2);
        double u = 0.0;
        if (len2 > 0.0) {
            u = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
        }
        best = std::min(best, (p - (a + u * ab)).norm());
    }
    if (!(length > 0.0)) {
        fail(ErrorCode::ConfigError, "polyline has zero length");
    }
    return best;
}

TraceReport trace_errors(std::span<const TimedPoint2> drawn, std::span<const Vec2> truth) {
    if (drawn.size() < 2) {
        fail(ErrorCode::ConfigError, "drawn trajectory needs at least 2 points");
    }
    std::vector<double> errors;
    errors.reserve(drawn.size());
    for (const auto& s : drawn) {
        errors.push_back(100.0 * point_to_polyline(s.p, truth));
    }
    TraceReport r;
    double sum_sq = 0.0;
    for (double e : errors) {
        r.max_error = std::max(r.max_error, e);
        sum_sq += e * e;
    }
    r.mean_error = mean(errors);
    r.rmse = std::sqrt(sum_sq / static_cast<double>(errors.size()));
    r.duration = drawn.back().t - drawn.front().t;
    r.n_samples = errors.size();
    const Interval ci = confidence_interval(errors);
    r.ci_lo = ci.lo;
    r.ci_hi = ci.hi;
    return r;
}

TraceReport trace_errors(std::span<const TimedPoint2> drawn, const GroundTruthShape& truth) {
    const Polyline2 poly = truth.polyline();
    return trace_errors(drawn, poly);
}

nlohmann::json to_json(const TraceReport& r) {
    return {
        {"max_error_cm", r.max_error},
        {"mean_error_cm", r.mean_error},
        {"rmse_cm", r.rmse},
        {"duration_s", r.duration},
        {"n_samples", r.n_samples},
        {"ci95_cm", {r.ci_lo, r.ci_hi}},
    };
}

TraceReport report_from_json(const nlohmann::json& doc) {
    TraceReport r;
    try {
        r.max_error = doc.at("max_error_cm").get<double>();
        r.mean_error = doc.at("mean_error_cm").get<double>();
        r.rmse = doc.at("rmse_cm").get<double>();
        r.duration = doc.at("duration_s").get<double>();
        r.n_samples = doc.at("n_samples").get<std::size_t>();
        const auto& ci = doc.at("ci95_cm");
        r.ci_lo = ci.at(0).get<double>();
        r.ci_hi = ci.at(1).get<double>();
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ParseError, std::string("report: ") + e.what());
    }
    return r;
}

std::string format_table(std::span<const TableColumn> columns) {
    constexpr int kLabel = 16;
    constexpr int kCell = 8;

    std::vector<std::string> shapes;
    for (const auto& c : columns) {
        if (std::find(shapes.begin(), shapes.end(), c.shape) == shapes.end()) {
            shapes.push_back(c.shape);
        }
    }
    std::vector<const TableColumn*> ordered;
    std::vector<int> group_sizes;
    for (const auto& s : shapes) {
        int n = 0;
        for (const auto& c : columns) {
            if (c.shape == s) {
                ordered.push_back(&c);
                ++n;
            }
        }
        group_sizes.push_back(n);
    }

    auto pad = [](std::string s, int width) {
        if (static_cast<int>(s.size()) < width) {
            const int total = width - static_cast<int>(s.size());
            s = std::string(total / 2, ' ') + s + std::string(total - total / 2, ' ');
        }
        return s;
    };

    std::string out = std::string(kLabel, ' ') + "|";
    for (std::size_t g = 0; g < shapes.size(); ++g) {
        out += pad(shapes[g], group_sizes[g] * (kCell + 1) - 1) + "|";
    }
    out += "\n" + std::string(kLabel, ' ') + "|";
    for (const auto* c : ordered) {
        out += pad(c->method, kCell) + "|";
    }
    out += "\n";

    struct Row {
        const char* label;
        double TraceReport::*field;
    };
    const Row rows[] = {
        {"Max error, cm", &TraceReport::max_error},
        {"Mean error, cm", &TraceReport::mean_error},
        {"RMSE, cm", &TraceReport::rmse},
        {"Time, sec", &TraceReport::duration},
    };
    char buf[64];
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof buf, "%-*s|", kLabel, row.label);
        out += buf;
        for (const auto* c : ordered) {
            std::snprintf(buf, sizeof buf, "%*.2f |", kCell - 1, c->report.*row.field);
            out += buf;
        }
        out += "\n";
    }
    return out;
}

} // namespace dronepaint::metrics
