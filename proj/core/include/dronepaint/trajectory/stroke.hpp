#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dronepaint::trajectory {

struct StrokePoint {
    double x = 0.0; // pixels
    double y = 0.0;
    double t = 0.0; // seconds

    friend bool operator==(const StrokePoint&, const StrokePoint&) = default;
};

// A drawn stroke. Erasing can cut it into several maximal runs; `breaks` holds
// the indices (ascending, in (0, size)) where a new run starts.
struct RawStroke {
    std::vector<StrokePoint> points;
    std::vector<std::size_t> breaks;

    bool empty() const { return points.empty(); }
    std::size_t size() const { return points.size(); }

    std::vector<std::vector<StrokePoint>> runs() const;

    friend bool operator==(const RawStroke&, const RawStroke&) = default;
};

} // namespace dronepaint::trajectory
