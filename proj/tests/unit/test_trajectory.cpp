#include "dronepaint/error.hpp"
#include "dronepaint/trajectory/filter.hpp"
#include "dronepaint/trajectory/flight_zone.hpp"
#include "dronepaint/trajectory/pipeline.hpp"
#include "dronepaint/trajectory/resample.hpp"
#include "dronepaint/trajectory/trajectory_io.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <random>

namespace dp = dronepaint;
namespace tr = dronepaint::trajectory;
using dp::Vec2;
using dp::Vec3;

namespace {

template <class F>
void expect_code(F&& f, dp::ErrorCode code) {
    try {
        f();
        ADD_FAILURE() << "expected " << dp::to_string(code);
    } catch (const dp::Error& e) {
        EXPECT_EQ(e.code(), code) << e.what();
    }
}

// Brute-force distance from a point to a polyline, segment by segment.
template <class V>
double dist_to_polyline(const V& p, const std::vector<V>& poly) {
    double best = INFINITY;
    for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
        const V d = poly[i + 1] - poly[i];
        const double len2 = d.squaredNorm();
        double u = len2 > 0 ? (p - poly[i]).dot(d) / len2 : 0.0;
        u = std::clamp(u, 0.0, 1.0);
        best = std::min(best, (poly[i] + u * d - p).norm());
    }
    return best;
}

// Textbook predictor-corrector recurrence, one axis.
std::vector<double> reference_filter(const std::vector<double>& z, const std::vector<double>& t,
                                     double alpha, double beta, double fallback) {
    std::vector<double> out{z[0]};
    double x = z[0];
    double v = 0.0;
    for (std::size_t i = 1; i < z.size(); ++i) {
        double dt = t[i] - t[i - 1];
        if (dt <= 0) {
            dt = fallback;
        }
        const double xp = x + v * dt;
        const double r = z[i] - xp;
        x = xp + alpha * r;
        v = v + beta / dt * r;
        out.push_back(x);
    }
    return out;
}

std::vector<tr::StrokePoint> ramp(int n, double rate) {
    std::vector<tr::StrokePoint> s;
    for (int i = 0; i < n; ++i) {
        const double t = i / rate;
        s.push_back({t, 2.0 * t, t});
    }
    return s;
}

} // namespace

TEST(Filter, ConstantInputConverges) {
    std::vector<tr::StrokePoint> s;
    s.push_back({0, 0, 0});
    for (int i = 1; i <= 60; ++i) {
        s.push_back({5.0, -3.0, i / 30.0});
    }
    const auto out = tr::alpha_beta_filter(s, {});
    for (std::size_t i = 51; i < out.size(); ++i) {
        EXPECT_LT(std::abs(out[i].x - 5.0), 1e-6);
        EXPECT_LT(std::abs(out[i].y + 3.0), 1e-6);
    }
}

TEST(Filter, IdentityWithFullCorrection) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n(0, 10);
    std::vector<tr::StrokePoint> s;
    for (int i = 0; i < 100; ++i) {
        s.push_back({n(rng), n(rng), i * 0.03});
    }
    const auto out = tr::alpha_beta_filter(s, {1.0, 0.0, 1.0 / 30});
    EXPECT_EQ(out, s);
}

TEST(Filter, RampLagVanishes) {
    const auto out = tr::alpha_beta_filter(ramp(260, 30.0), {0.7, 0.41, 1.0 / 30});
    for (std::size_t i = 200; i < out.size(); ++i) {
        EXPECT_LT(std::abs(out[i].x - out[i].t), 1e-3);
        EXPECT_LT(std::abs(out[i].y - 2 * out[i].t), 1e-3);
    }
}

TEST(Filter, MatchesReferenceRecurrence) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n(0, 50);
    std::uniform_real_distribution<double> step(0.0, 0.05);
    std::vector<tr::StrokePoint> s;
    std::vector<double> xs, ys, ts;
    double t = 0;
    for (int i = 0; i < 300; ++i) {
        if (i % 17 != 3) {
            t += step(rng);
        }
        s.push_back({n(rng), n(rng), t});
        xs.push_back(s.back().x);
        ys.push_back(s.back().y);
        ts.push_back(t);
    }
    const tr::FilterParams p{0.55, 0.2, 0.04};
    const auto out = tr::alpha_beta_filter(s, p);
    const auto rx = reference_filter(xs, ts, p.alpha, p.beta, p.fallback_dt);
    const auto ry = reference_filter(ys, ts, p.alpha, p.beta, p.fallback_dt);
    for (std::size_t i = 0; i < s.size(); ++i) {
        EXPECT_NEAR(out[i].x, rx[i], 1e-9 * (1 + std::abs(rx[i])));
        EXPECT_NEAR(out[i].y, ry[i], 1e-9 * (1 + std::abs(ry[i])));
        EXPECT_EQ(out[i].t, s[i].t);
    }
}

TEST(Filter, Errors) {
    expect_code([] { tr::alpha_beta_filter({}, {}); }, dp::ErrorCode::EmptyStroke);
    const std::vector<tr::StrokePoint> one{{1, 2, 0}};
    expect_code([&] { tr::alpha_beta_filter(one, {0.0, 0.1, 0.1}); }, dp::ErrorCode::ConfigError);
    expect_code([&] { tr::alpha_beta_filter(one, {1.5, 0.1, 0.1}); }, dp::ErrorCode::ConfigError);
    expect_code([&] { tr::alpha_beta_filter(one, {0.5, -0.1, 0.1}); }, dp::ErrorCode::ConfigError);
    EXPECT_EQ(tr::alpha_beta_filter(one, {}), one);
}

TEST(Resample, SegmentQuarters) {
    const std::vector<Vec2> seg{{0, 0}, {1, 0}};
    const auto out = tr::resample_uniform(seg, 0.25);
    ASSERT_EQ(out.size(), 5u);
    for (int i = 0; i < 5; ++i) {
        EXPECT_NEAR(out[i].x(), 0.25 * i, 1e-15);
        EXPECT_EQ(out[i].y(), 0.0);
    }
}

TEST(Resample, ClosedSquare) {
    const std::vector<Vec2> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}};
    const auto out = tr::resample_uniform(sq, 0.5);
    ASSERT_EQ(out.size(), 9u);
    for (const auto& p : out) {
        EXPECT_LT(dist_to_polyline(p, sq), 1e-9);
    }
    EXPECT_EQ(out.front(), sq.front());
    EXPECT_EQ(out.back(), sq.back());
}

TEST(Resample, DegenerateInputs) {
    const std::vector<Vec2> same{{1, 1}, {1, 1}, {1, 1}};
    expect_code([&] { tr::resample_uniform(same, 1.0); }, dp::ErrorCode::DegenerateStroke);
    const std::vector<Vec2> one{{1, 1}};
    expect_code([&] { tr::resample_uniform(one, 1.0); }, dp::ErrorCode::DegenerateStroke);
    const std::vector<Vec2> seg{{0, 0}, {1, 0}};
    expect_code([&] { tr::resample_uniform(seg, 0.0); }, dp::ErrorCode::ConfigError);
    expect_code([&] { tr::resample_uniform(seg, -1.0); }, dp::ErrorCode::ConfigError);
}

TEST(Resample, ShortPolylineKeepsEndpoints) {
    const std::vector<Vec3> seg{{0, 0, 0}, {0.1, 0, 0}};
    const auto out = tr::resample_uniform(seg, 1.0);
    ASSERT_EQ(out.size(), 2u);
    EXPECT_EQ(out[1], seg[1]);
}

TEST(ResampleProperty, RandomPolylines) {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> coord(-100, 100);
    std::uniform_int_distribution<int> count(2, 40);
    std::uniform_real_distribution<double> sp(0.5, 20);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<Vec2> poly;
        const int n = count(rng);
        for (int i = 0; i < n; ++i) {
            poly.emplace_back(coord(rng), coord(rng));
        }
        const double s = sp(rng);
        const auto out = tr::resample_uniform(poly, s);
        ASSERT_GE(out.size(), 2u);
        for (std::size_t i = 1; i + 1 < out.size(); ++i) {
            EXPECT_NEAR((out[i] - out[i - 1]).norm(), s, 1e-6 * s);
        }
        EXPECT_LE((out.back() - out[out.size() - 2]).norm(), s * (1 + 1e-12));
        for (const auto& p : out) {
            EXPECT_LT(dist_to_polyline(p, poly), 1e-9);
        }
        EXPECT_EQ(out.front(), poly.front());
        EXPECT_EQ(out.back(), poly.back());
    }
}

TEST(ResampleProperty, StraightRunsAreArcLengthSamples) {
    const std::vector<Vec3> line{{0, 0, 0}, {1, 2, 2}, {2, 4, 4}};
    const auto out = tr::resample_uniform(line, 0.7);
    const Vec3 dir = Vec3(1, 2, 2) / 3.0;
    for (std::size_t i = 0; i + 1 < out.size(); ++i) {
        EXPECT_LT((out[i] - 0.7 * static_cast<double>(i) * dir).norm(), 1e-12);
    }
}

TEST(Zone, CornersAndCenter) {
    const tr::FlightZoneConfig z;
    EXPECT_EQ(z.to_world({0, 0}), Vec3(-1.5, 0, 2.5));
    EXPECT_EQ(z.to_world({640, 480}), Vec3(1.5, 0, 0.5));
    EXPECT_EQ(z.to_world({320, 240}), Vec3(0, 0, 1.5));
    const Vec3 clamped = z.to_world({-10, 240});
    EXPECT_EQ(clamped.x(), -1.5);
    EXPECT_EQ(clamped.z(), 1.5);
    tr::FlightZoneConfig deep;
    deep.depth = 0.75;
    EXPECT_EQ(deep.to_world({10, 10}).y(), 0.75);
}

TEST(Zone, NoFlip) {
    tr::FlightZoneConfig z;
    z.flip_y = false;
    EXPECT_EQ(z.to_world({0, 0}), Vec3(-1.5, 0, 0.5));
}

TEST(Zone, ScreenRoundTrip) {
    tr::FlightZoneConfig z;
    z.screen_x = 12;
    z.screen_y = 30;
    z.screen_w = 800;
    z.screen_h = 600;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ux(12, 812), uy(30, 630);
    for (int i = 0; i < 1000; ++i) {
        const Vec2 p(ux(rng), uy(rng));
        EXPECT_LT((z.to_screen(z.to_world(p)) - p).norm(), 1e-9);
    }
}

TEST(ZoneProperty, PreservesCollinearity) {
    const tr::FlightZoneConfig z;
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> ux(0, 640), uy(0, 480), ut(0, 1);
    for (int i = 0; i < 1000; ++i) {
        const Vec2 a(ux(rng), uy(rng));
        const Vec2 b(ux(rng), uy(rng));
        const Vec2 c = a + ut(rng) * (b - a);
        const Vec3 wa = z.to_world(a), wb = z.to_world(b), wc = z.to_world(c);
        const double area = (wb - wa).cross(wc - wa).norm();
        EXPECT_LT(area, 1e-9);
    }
}

TEST(Zone, Validation) {
    tr::FlightZoneConfig z;
    z.screen_w = 0;
    expect_code([&] { tr::validate(z); }, dp::ErrorCode::ConfigError);
    z = {};
    z.x_max = z.x_min;
    expect_code([&] { tr::validate(z); }, dp::ErrorCode::ConfigError);
    const std::vector<Vec2> pts{{0, 0}};
    expect_code([&] { tr::screen_to_world(pts, z); }, dp::ErrorCode::ConfigError);
}

TEST(Zone, JsonRoundTrip) {
    tr::FlightZoneConfig z;
    z.screen_w = 1280;
    z.depth = 0.3;
    z.flip_y = false;
    EXPECT_EQ(tr::zone_from_json(tr::to_json(z)), z);
}

TEST(Schedule, UniformIntervals) {
    std::vector<Vec3> w;
    for (int i = 0; i < 6; ++i) {
        w.emplace_back(0.1 * i, 0, 1);
    }
    const auto s = tr::schedule_waypoints(w, 0.5);
    for (std::size_t i = 1; i < s.size(); ++i) {
        EXPECT_NEAR(s[i].dispatch_offset - s[i - 1].dispatch_offset, 0.2, 1e-12);
    }
}

TEST(Schedule, SingleWaypointAndShortTail) {
    const std::vector<Vec3> one{{1, 2, 3}};
    const auto s1 = tr::schedule_waypoints(one, 1.0);
    ASSERT_EQ(s1.size(), 1u);
    EXPECT_EQ(s1[0].dispatch_offset, 0.0);
    const std::vector<Vec3> w{{0, 0, 0}, {0.1, 0, 0}, {0.2, 0, 0}, {0.23, 0, 0}};
    const auto s = tr::schedule_waypoints(w, 0.5);
    EXPECT_NEAR(s[3].dispatch_offset - s[2].dispatch_offset, 0.03 / 0.5, 1e-12);
    expect_code([&] { tr::schedule_waypoints(w, 0.0); }, dp::ErrorCode::ConfigError);
    expect_code([&] { tr::schedule_waypoints({}, 1.0); }, dp::ErrorCode::ConfigError);
}

TEST(ScheduleProperty, TotalTimeIsLengthOverSpeed) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> c(-2, 2);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Vec3> poly;
        for (int i = 0; i < 10; ++i) {
            poly.emplace_back(c(rng), c(rng), c(rng));
        }
        const auto w = tr::resample_uniform(poly, 0.05);
        const double speed = 0.1 + std::abs(c(rng));
        const auto s = tr::schedule_waypoints(w, speed);
        double len = 0;
        for (std::size_t i = 1; i < w.size(); ++i) {
            len += (w[i] - w[i - 1]).norm();
            EXPECT_GT(s[i].dispatch_offset, s[i - 1].dispatch_offset);
        }
        EXPECT_NEAR(s.back().dispatch_offset, len / speed, 1e-9);
    }
}

TEST(Erase, FarCenterKeepsStroke) {
    tr::RawStroke s{{{0, 0, 0}, {1, 0, 0.1}, {2, 0, 0.2}}, {}};
    EXPECT_EQ(tr::erase_region(s, {100, 100}, 5), s);
}

TEST(Erase, CoverEverything) {
    tr::RawStroke s{{{0, 0, 0}, {1, 0, 0.1}, {2, 0, 0.2}}, {}};
    EXPECT_TRUE(tr::erase_region(s, {1, 0}, 50).empty());
}

TEST(Erase, MiddleSplitsRunsAndPipelineRejectsThem) {
    tr::RawStroke s{{{0, 0, 0}, {100, 0, 0.1}, {200, 0, 0.2}}, {}};
    const auto e = tr::erase_region(s, {100, 0}, 10);
    ASSERT_EQ(e.size(), 2u);
    EXPECT_EQ(e.breaks, std::vector<std::size_t>{1});
    const auto runs = e.runs();
    ASSERT_EQ(runs.size(), 2u);
    EXPECT_EQ(runs[0].size(), 1u);
    EXPECT_EQ(runs[1].size(), 1u);
    const auto outcomes = tr::process_runs(e, {});
    ASSERT_EQ(outcomes.size(), 2u);
    for (const auto& o : outcomes) {
        ASSERT_TRUE(o.error.has_value());
        EXPECT_EQ(o.error->code(), dp::ErrorCode::DegenerateStroke);
    }
}

TEST(Erase, ExistingBreaksSurvive) {
    tr::RawStroke s{{{0, 0, 0}, {1, 0, 0.1}, {2, 0, 0.2}, {3, 0, 0.3}}, {2}};
    const auto e = tr::erase_region(s, {100, 100}, 1);
    EXPECT_EQ(e, s);
    const auto cut = tr::erase_region(s, {0, 0}, 0.5);
    EXPECT_EQ(cut.breaks, std::vector<std::size_t>{1});
    EXPECT_EQ(cut.size(), 3u);
}

TEST(Pipeline, StraightStrokeIsCollinear) {
    std::vector<tr::StrokePoint> s;
    for (int i = 0; i <= 60; ++i) {
        s.push_back({100 + 4.0 * i, 100 + 2.0 * i, i / 30.0});
    }
    const auto w = tr::process(s, {});
    ASSERT_GT(w.size(), 2u);
    const Vec3 a = w.front().position;
    const Vec3 dir = (w.back().position - a).normalized();
    for (const auto& p : w) {
        const Vec3 d = p.position - a;
        EXPECT_LT((d - d.dot(dir) * dir).norm(), 1e-6);
    }
}

TEST(Pipeline, ComposesStages) {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> n(0, 3);
    std::vector<tr::StrokePoint> s;
    for (int i = 0; i < 90; ++i) {
        s.push_back({320 + 100 * std::cos(i / 14.0) + n(rng), 240 + 100 * std::sin(i / 14.0) + n(rng), i / 30.0});
    }
    const tr::PipelineParams p;
    const auto smoothed = tr::alpha_beta_filter(s, p.filter);
    std::vector<Vec2> px;
    for (const auto& q : smoothed) {
        px.emplace_back(q.x, q.y);
    }
    const auto world = tr::screen_to_world(tr::resample_uniform(px, p.spacing_px), p.zone);
    const auto expect = tr::schedule_waypoints(world, p.speed);
    const auto got = tr::process(s, p);
    ASSERT_EQ(got.size(), expect.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
        EXPECT_EQ(got[i].position, expect[i].position);
        EXPECT_EQ(got[i].dispatch_offset, expect[i].dispatch_offset);
    }
    const auto again = tr::process(s, p);
    for (std::size_t i = 0; i < got.size(); ++i) {
        EXPECT_EQ(got[i].position, again[i].position);
    }
}

TEST(Pipeline, EmptyStroke) {
    expect_code([] { tr::process({}, {}); }, dp::ErrorCode::EmptyStroke);
    const auto o = tr::process_runs({}, {});
    ASSERT_EQ(o.size(), 1u);
    EXPECT_EQ(o[0].error->code(), dp::ErrorCode::EmptyStroke);
}

TEST(Pipeline, JsonRoundTrip) {
    tr::FilterParams f{0.5, 0.1, 0.02};
    const auto fb = tr::filter_from_json(tr::to_json(f));
    EXPECT_EQ(fb.alpha, f.alpha);
    EXPECT_EQ(fb.beta, f.beta);
    EXPECT_EQ(fb.fallback_dt, f.fallback_dt);
    tr::PipelineParams p;
    p.spacing_px = 7.5;
    p.speed = 0.4;
    const auto pb = tr::pipeline_from_json(tr::pipeline_to_json(p));
    EXPECT_EQ(pb.spacing_px, 7.5);
    EXPECT_EQ(pb.speed, 0.4);
    expect_code([] { tr::pipeline_from_json(nlohmann::json{{"speed", -1}}); }, dp::ErrorCode::ConfigError);
}

TEST(TrajectoryIo, RoundTripExact) {
    std::mt19937_64 rng(6);
    std::normal_distribution<double> n(0, 1e3);
    for (bool z : {false, true}) {
        tr::TrajectoryFile f;
        f.has_z = z;
        for (int i = 0; i < 50; ++i) {
            f.points.emplace_back(n(rng), n(rng), z ? n(rng) : 0.0);
            f.t.push_back(std::abs(n(rng)));
        }
        const auto back = tr::parse_trajectory_csv(tr::write_trajectory_csv(f));
        EXPECT_EQ(back.has_z, z);
        EXPECT_EQ(back.points, f.points);
        EXPECT_EQ(back.t, f.t);
    }
}

TEST(TrajectoryIo, ParseErrors) {
    expect_code([] { tr::parse_trajectory_csv(""); }, dp::ErrorCode::ParseError);
    expect_code([] { tr::parse_trajectory_csv("a,b\n1,2\n"); }, dp::ErrorCode::ParseError);
    expect_code([] { tr::parse_trajectory_csv("x,y,t\n1,zz,3\n"); }, dp::ErrorCode::ParseError);
    expect_code([] { tr::parse_trajectory_csv("x,y,t\n1,2\n"); }, dp::ErrorCode::ParseError);
}
