#pragma once

#include "dronepaint/types.hpp"

#include <span>

namespace dronepaint::trajectory {

// Walks the polyline from its first vertex and emits the next point where the
// path first reaches Euclidean distance `spacing` from the previous output
// point, so consecutive outputs are exactly `spacing` apart and lie on the
// polyline. The exact final vertex closes the sequence (its gap is <= spacing).
// On straight runs this coincides with arc-length sampling at 0, s, 2s, ...
//
// Throws DegenerateStroke for fewer than two distinct points, ConfigError for
// spacing <= 0.
Polyline2 resample_uniform(std::span<const Vec2> points, double spacing);
Polyline3 resample_uniform(std::span<const Vec3> points, double spacing);

} // namespace dronepaint::trajectory
