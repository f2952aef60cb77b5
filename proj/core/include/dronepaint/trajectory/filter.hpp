#pragma once

#include "dronepaint/trajectory/stroke.hpp"

namespace dronepaint::trajectory {

struct FilterParams {
    double alpha = 0.7;
    double beta = 0.41;
    double fallback_dt = 1.0 / 30.0; // used when consecutive timestamps do not advance
};

// Throws ConfigError unless alpha in (0,1], beta >= 0, fallback_dt > 0.
void validate(const FilterParams& p);

// Per-axis position/velocity tracker started at the first sample with zero
// velocity; timestamps pass through unchanged. Throws EmptyStroke.
std::vector<StrokePoint> alpha_beta_filter(std::span<const StrokePoint> stroke, const FilterParams& p);

} // namespace dronepaint::trajectory
