#include "dronepaint/canvas/exposure_canvas.hpp"
#include "dronepaint/field/potential_field.hpp"
#include "dronepaint/gesture/classifier.hpp"
#include "dronepaint/gesture/dataset.hpp"
#include "dronepaint/gesture/features.hpp"
#include "dronepaint/metrics/trace_error.hpp"
#include "dronepaint/sim/world.hpp"
#include "dronepaint/trajectory/filter.hpp"
#include "dronepaint/trajectory/resample.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

namespace dp = dronepaint;
using dp::Vec2;
using dp::Vec3;

namespace {

void BM_ExtractFeatures(benchmark::State& state) {
    const auto frame = dp::gesture::canonical_pose(dp::gesture::GestureClass::Rock);
    for (auto _ : state) {
        benchmark::DoNotOptimize(dp::gesture::extract_features(frame));
    }
}
BENCHMARK(BM_ExtractFeatures);

void BM_Classify(benchmark::State& state) {
    auto spec = dp::gesture::DatasetSpec::defaults();
    for (auto& c : spec.classes) {
        c.count = 50;
    }
    dp::gesture::Hyperparameters hyper;
    hyper.epochs = 2;
    const auto model = dp::gesture::train_classifier(dp::gesture::synth_dataset(spec, 1), hyper, 1);
    const auto features = dp::gesture::extract_features(dp::gesture::canonical_pose(dp::gesture::GestureClass::Five));
    for (auto _ : state) {
        benchmark::DoNotOptimize(dp::gesture::classify(model, features));
    }
}
BENCHMARK(BM_Classify);

std::vector<dp::trajectory::StrokePoint> noisy_circle(std::size_t n) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> noise(0.0, 2.0);
    std::vector<dp::trajectory::StrokePoint> out;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(n);
        out.push_back({320 + 150 * std::cos(a) + noise(rng), 240 + 150 * std::sin(a) + noise(rng), i / 30.0});
    }
    return out;
}

void BM_AlphaBetaFilter(benchmark::State& state) {
    const auto stroke = noisy_circle(static_cast<std::size_t>(state.range(0)));
    const dp::trajectory::FilterParams p;
    for (auto _ : state) {
        benchmark::DoNotOptimize(dp::trajectory::alpha_beta_filter(stroke, p));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AlphaBetaFilter)->Arg(300)->Arg(3000);

void BM_Resample(benchmark::State& state) {
    std::vector<Vec2> poly;
    for (const auto& s : noisy_circle(static_cast<std::size_t>(state.range(0)))) {
        poly.emplace_back(s.x, s.y);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(dp::trajectory::resample_uniform(poly, 10.0));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Resample)->Arg(300)->Arg(3000);

void BM_WorldStep(benchmark::State& state) {
    dp::sim::SimConfig cfg;
    cfg.swarm_size = static_cast<int>(state.range(0));
    cfg.obstacles.push_back(dp::field::Sphere{{0, 0, 1.5}, 0.3});
    dp::sim::World w(cfg);
    for (int i = 0; i < cfg.swarm_size; ++i) {
        w.place(i, {-2.0 + 0.4 * i, 0.5, 1.0}, dp::sim::FlightStatus::Airborne);
        w.set_goal(i, {2.0 - 0.4 * i, -0.5, 2.0});
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(w.step());
    }
}
BENCHMARK(BM_WorldStep)->Arg(3)->Arg(10);

void BM_CanvasSplat(benchmark::State& state) {
    dp::canvas::ExposureCanvas canvas(640, 480, dp::trajectory::FlightZoneConfig{});
    for (auto _ : state) {
        canvas.accumulate({0.1, 0.0, 1.4}, {1.0, 0.5, 0.2}, 0.05, 2.0);
    }
}
BENCHMARK(BM_CanvasSplat);

void BM_TraceErrors(benchmark::State& state) {
    const dp::metrics::GroundTruthShape circle{dp::metrics::ShapeKind::Circle, 0.5, Vec2(0.0, 1.5)};
    std::vector<dp::metrics::TimedPoint2> drawn;
    for (int i = 0; i < 400; ++i) {
        const double a = 2.0 * M_PI * i / 400;
        drawn.push_back({circle.center + 0.52 * Vec2(std::cos(a), std::sin(a)), i / 30.0});
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(dp::metrics::trace_errors(drawn, circle));
    }
}
BENCHMARK(BM_TraceErrors);

} // namespace

BENCHMARK_MAIN();
