#pragma once

#include <Eigen/Dense>

#include <vector>

namespace dronepaint {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

using Polyline2 = std::vector<Vec2>;
using Polyline3 = std::vector<Vec3>;

struct Rgb {
    double r = 0.0;
    double g = 0.0;
    double b = 0.0;

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

} // namespace dronepaint
