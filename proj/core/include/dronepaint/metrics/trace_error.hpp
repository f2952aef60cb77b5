#pragma once

#include "dronepaint/types.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace dronepaint::metrics {

enum class ShapeKind { Square, Circle, Triangle };

std::string_view to_string(ShapeKind k) noexcept;
std::optional<ShapeKind> shape_from_string(std::string_view name) noexcept;

// Closed reference path in the drawing plane (meters).
struct GroundTruthShape {
    ShapeKind kind = ShapeKind::Square;
    double size = 1.0;      // side for square/triangle, radius for circle
    Vec2 center{0.0, 1.5};

    // First point repeated at the end. Circles use 720 vertices; the square
    // starts at its top-left corner, the equilateral triangle at its apex.
    Polyline2 polyline() const;
};

void validate(const GroundTruthShape& s);
nlohmann::json to_json(const GroundTruthShape& s);
GroundTruthShape shape_from_json(const nlohmann::json& doc);

// Exact distance to the nearest segment. Throws ConfigError for fewer than two
// points or a zero-length polyline.
double point_to_polyline(const Vec2& p, std::span<const Vec2> poly);

struct TimedPoint2 {
    Vec2 p = Vec2::Zero();
    double t = 0.0;
};

struct TraceReport {
    double max_error = 0.0;  // cm
    double mean_error = 0.0; // cm
    double rmse = 0.0;       // cm
    double duration = 0.0;   // s
    std::size_t n_samples = 0;
    double ci_lo = 0.0;      // 95% CI of the mean error, cm
    double ci_hi = 0.0;

    friend bool operator==(const TraceReport&, const TraceReport&) = default;
};

// Drawn point -> truth polyline distance at every drawn sample; inputs in
// meters, report in centimeters. Throws ConfigError for fewer than two samples.
TraceReport trace_errors(std::span<const TimedPoint2> drawn, std::span<const Vec2> truth);
TraceReport trace_errors(std::span<const TimedPoint2> drawn, const GroundTruthShape& truth);

nlohmann::json to_json(const TraceReport& r);
TraceReport report_from_json(const nlohmann::json& doc);

struct TableColumn {
    std::string shape;  // e.g. "Square"
    std::string method; // e.g. "H" or "M"
    TraceReport report;
};

// Plain-text grid: one column group per shape, one column per input method,
// rows "Max error, cm" / "Mean error, cm" / "RMSE, cm" / "Time, sec".
std::string format_table(std::span<const TableColumn> columns);

} // namespace dronepaint::metrics
