#pragma once

#include "dronepaint/gesture/hand.hpp"

#include <array>
#include <cstddef>

namespace dronepaint::gesture {

inline constexpr std::size_t kAngleFeatures = 15;
inline constexpr std::size_t kDistanceFeatures = kLandmarkCount * (kLandmarkCount - 1) / 2;
inline constexpr std::size_t kFeatureCount = kAngleFeatures + kDistanceFeatures;

using FeatureVector = std::array<double, kFeatureCount>;

// Landmark chains per finger, thumb first, rooted at the wrist.
inline constexpr std::array<std::array<std::size_t, 5>, 5> kFingerChains = {{
    {0, 1, 2, 3, 4},
    {0, 5, 6, 7, 8},
    {0, 9, 10, 11, 12},
    {0, 13, 14, 15, 16},
    {0, 17, 18, 19, 20},
}};

// Interior angle at `joint` between the bones towards `prev` and `next`, in [0, pi].
double joint_angle(const Vec3& prev, const Vec3& joint, const Vec3& next);

// Layout: 15 joint angles (finger-major, proximal joint first), then the 210
// pairwise landmark distances for (i, j), i < j, lexicographic, divided by the
// wrist to middle-base distance measured in the same normalized space.
FeatureVector extract_features(const HandFrame& frame);

} // namespace dronepaint::gesture
