#include "dronepaint/trajectory/resample.hpp"

#include "dronepaint/error.hpp"

#include <cmath>

namespace dronepaint::trajectory {

namespace {

template <class V>
std::vector<V> walk(std::span<const V> points, double spacing) {
    if (!(spacing > 0.0) || !std::isfinite(spacing)) {
        fail(ErrorCode::ConfigError, "resample spacing must be positive");
    }
    std::vector<V> q;
    q.reserve(points.size());
    for (const auto& p : points) {
        if (q.empty() || p != q.back()) {
            q.push_back(p);
        }
    }
    if (q.size() < 2) {
        fail(ErrorCode::DegenerateStroke, "stroke needs at least two distinct points");
    }

    const double s2 = spacing * spacing;
    std::vector<V> out{q.front()};
    V anchor = q.front(); // last emitted point
    V a = q.front();      // start of the remaining part of segment `seg`
    std::size_t seg = 0;
    while (seg + 1 < q.size()) {
        const V& b = q[seg + 1];
        if ((b - anchor).squaredNorm() < s2) {
            ++seg;
            a = q[seg];
            continue;
        }
        // |a - anchor| < spacing <= |b - anchor|: the exit root of
        // |a + u d - anchor|^2 = spacing^2 lies in (0, 1].
        const V d = b - a;
        const V w = a - anchor;
        const double A = d.squaredNorm();
        const double B = d.dot(w);
        const double C = w.squaredNorm() - s2;
        const double root = std::sqrt(std::max(0.0, B * B - A * C));
        double u = B > 0.0 ? -C / (B + root) : (root - B) / A;
        u = std::clamp(u, 0.0, 1.0);
        anchor = u == 1.0 ? b : V(a + u * d);
        out.push_back(anchor);
        a = anchor;
    }
    if ((out.back() - q.back()).norm() <= 1e-9 * spacing) {
        out.back() = q.back();
    } else {
        out.push_back(q.back());
    }
    return out;
}

} // namespace

Polyline2 resample_uniform(std::span<const Vec2> points, double spacing) {
    return walk(points, spacing);
}

Polyline3 resample_uniform(std::span<const Vec3> points, double spacing) {
    return walk(points, spacing);
}

} // namespace dronepaint::trajectory
