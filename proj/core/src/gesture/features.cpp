#include "dronepaint/gesture/features.hpp"

#include "dronepaint/error.hpp"

#include <cmath>

namespace dronepaint::gesture {

double joint_angle(const Vec3& prev, const Vec3& joint, const Vec3& next) {
    const Vec3 a = prev - joint;
    const Vec3 b = next - joint;
    // atan2 stays well conditioned near 0 and pi where acos does not.
    return std::atan2(a.cross(b).norm(), a.dot(b));
}

FeatureVector extract_features(const HandFrame& frame) {
    validate(frame);

    std::array<Vec3, kLandmarkCount> p;
    for (std::size_t i = 0; i < kLandmarkCount; ++i) {
        p[i] = frame.landmarks[i].vec();
    }

    const double palm = (p[landmark::kMiddleMcp] - p[landmark::kWrist]).norm();
    if (palm == 0.0) {
        fail(ErrorCode::DegenerateHand, "palm size is zero");
    }

    FeatureVector out{};
    std::size_t k = 0;
    for (const auto& chain : kFingerChains) {
        for (std::size_t j = 1; j + 1 < chain.size(); ++j) {
            out[k++] = joint_angle(p[chain[j - 1]], p[chain[j]], p[chain[j + 1]]);
        }
    }
    for (std::size_t i = 0; i < kLandmarkCount; ++i) {
        for (std::size_t j = i + 1; j < kLandmarkCount; ++j) {
            out[k++] = (p[j] - p[i]).norm() / palm;
        }
    }
    return out;
}

} // namespace dronepaint::gesture
