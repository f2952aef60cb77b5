#pragma once

#include "dronepaint/trajectory/pipeline.hpp"

#include <string>
#include <vector>

namespace dronepaint::trajectory {

// Rows of a trajectory file: `x,y,t` or `x,y,z,t` after a one-line header.
struct TrajectoryFile {
    bool has_z = false;
    std::vector<Vec3> points; // z = 0 when absent
    std::vector<double> t;
};

std::string write_trajectory_csv(const TrajectoryFile& file);
TrajectoryFile parse_trajectory_csv(const std::string& text);

TrajectoryFile from_stroke(std::span<const StrokePoint> stroke);
std::vector<StrokePoint> to_stroke(const TrajectoryFile& file);
TrajectoryFile from_schedule(std::span<const TimedWaypoint> schedule);

} // namespace dronepaint::trajectory
