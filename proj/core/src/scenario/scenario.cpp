#include "dronepaint/scenario/scenario.hpp"

#include "dronepaint/error.hpp"
#include "dronepaint/field/potential_field.hpp"
#include "dronepaint/trajectory/trajectory_io.hpp"
#include "dronepaint/util/text_io.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace dronepaint::scenario {

namespace {

constexpr const char* kFormat = "dronepaint-scenario";
constexpr int kVersion = 1;

const std::set<std::string> kKeys = {"format", "version", "zone",   "sim",    "field", "obstacles", "filter",
                                     "pipeline", "canvas", "seed", "truth", "shape", "stroke",    "file"};

ShapeInput shape_input_from_json(const nlohmann::json& doc) {
    ShapeInput in;
    in.shape = metrics::shape_from_json(doc);
    try {
        in.noise_px = doc.value("noise_px", in.noise_px);
        in.rate_hz = doc.value("rate_hz", in.rate_hz);
        in.speed_px_s = doc.value("speed_px_s", in.speed_px_s);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ConfigError, std::string("shape: ") + e.what());
    }
    if (!(in.noise_px >= 0.0) || !(in.rate_hz > 0.0) || !(in.speed_px_s > 0.0)) {
        fail(ErrorCode::ConfigError, "shape: noise_px >= 0, rate_hz > 0 and speed_px_s > 0 required");
    }
    return in;
}

trajectory::RawStroke stroke_from_json(const nlohmann::json& doc) {
    if (!doc.is_array()) {
        fail(ErrorCode::ConfigError, "stroke must be an array of [x, y, t]");
    }
    trajectory::RawStroke stroke;
    for (const auto& p : doc) {
        if (!p.is_array() || p.size() != 3 || !p[0].is_number() || !p[1].is_number() || !p[2].is_number()) {
            fail(ErrorCode::ConfigError, "stroke point must be [x, y, t]");
        }
        stroke.points.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>()});
    }
    return stroke;
}

double perimeter(const std::vector<Vec2>& poly) {
    double len = 0.0;
    for (std::size_t i = 1; i < poly.size(); ++i) {
        len += (poly[i] - poly[i - 1]).norm();
    }
    return len;
}

Vec2 point_at(const std::vector<Vec2>& poly, double s) {
    for (std::size_t i = 1; i < poly.size(); ++i) {
        const double seg = (poly[i] - poly[i - 1]).norm();
        if (s <= seg && seg > 0.0) {
            return poly[i - 1] + (s / seg) * (poly[i] - poly[i - 1]);
        }
        s -= seg;
    }
    return poly.back();
}

std::vector<metrics::TimedPoint2> plane_points(const trajectory::RawStroke& stroke,
                                               const trajectory::FlightZoneConfig& zone) {
    std::vector<metrics::TimedPoint2> out;
    out.reserve(stroke.size());
    for (const auto& p : stroke.points) {
        const Vec3 w = zone.to_world(Vec2(p.x, p.y));
        out.push_back({Vec2(w.x(), w.z()), p.t});
    }
    return out;
}

nlohmann::json optional_report(std::span<const metrics::TimedPoint2> drawn, std::span<const Vec2> truth) {
    if (drawn.size() < 2) {
        return nullptr;
    }
    return metrics::to_json(metrics::trace_errors(drawn, truth));
}

} // namespace

Scenario parse_scenario(const std::string& text, const std::filesystem::path& base_dir) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ParseError, std::string("scenario: ") + e.what());
    }
    if (!doc.is_object()) {
        fail(ErrorCode::ParseError, "scenario must be an object");
    }
    if (doc.value("format", std::string{}) != kFormat) {
        fail(ErrorCode::ConfigError, std::string("scenario format must be \"") + kFormat + "\"");
    }
    if (!doc.contains("version") || !doc.at("version").is_number_integer() || doc.at("version").get<int>() != kVersion) {
        fail(ErrorCode::ConfigError, "unsupported scenario version");
    }
    for (const auto& [key, value] : doc.items()) {
        if (!kKeys.contains(key)) {
            fail(ErrorCode::ConfigError, "unknown scenario key \"" + key + "\"");
        }
    }

    Scenario s;
    if (doc.contains("zone")) {
        s.pipeline.zone = trajectory::zone_from_json(doc.at("zone"));
    }
    if (doc.contains("filter")) {
        s.pipeline.filter = trajectory::filter_from_json(doc.at("filter"));
    }
    if (doc.contains("pipeline")) {
        s.pipeline = trajectory::pipeline_from_json(doc.at("pipeline"), s.pipeline);
    }
    if (doc.contains("sim")) {
        s.sim = sim::sim_from_json(doc.at("sim"));
    }
    if (doc.contains("field")) {
        s.sim.field = field::field_from_json(doc.at("field"));
    }
    if (doc.contains("obstacles")) {
        const auto& obs = doc.at("obstacles");
        if (!obs.is_array()) {
            fail(ErrorCode::ConfigError, "obstacles must be an array");
        }
        for (const auto& o : obs) {
            s.sim.obstacles.push_back(field::obstacle_from_json(o));
        }
    }
    sim::validate(s.sim);
    if (doc.contains("canvas")) {
        s.canvas = canvas::canvas_from_json(doc.at("canvas"));
    }
    if (doc.contains("seed")) {
        if (!doc.at("seed").is_number_unsigned()) {
            fail(ErrorCode::ConfigError, "seed must be a non-negative integer");
        }
        s.seed = doc.at("seed").get<std::uint64_t>();
    }

    const int sources = static_cast<int>(doc.contains("shape")) + static_cast<int>(doc.contains("stroke")) +
                        static_cast<int>(doc.contains("file"));
    if (sources != 1) {
        fail(ErrorCode::ConfigError, "scenario needs exactly one of shape, stroke, file");
    }
    if (doc.contains("shape")) {
        s.input = shape_input_from_json(doc.at("shape"));
    } else if (doc.contains("stroke")) {
        s.input = stroke_from_json(doc.at("stroke"));
    } else {
        if (!doc.at("file").is_string()) {
            fail(ErrorCode::ConfigError, "file must be a path string");
        }
        std::filesystem::path path = doc.at("file").get<std::string>();
        if (path.is_relative()) {
            path = base_dir / path;
        }
        if (!std::filesystem::exists(path)) {
            fail(ErrorCode::ConfigError, "trajectory file not found: " + path.string());
        }
        s.input = FileInput{path};
    }
    if (doc.contains("truth")) {
        s.truth = metrics::shape_from_json(doc.at("truth"));
    } else if (const auto* shape = std::get_if<ShapeInput>(&s.input)) {
        s.truth = shape->shape;
    }
    return s;
}

nlohmann::json to_json(const Scenario& s) {
    nlohmann::json doc{
        {"format", kFormat},
        {"version", kVersion},
        {"zone", trajectory::to_json(s.pipeline.zone)},
        {"filter", trajectory::to_json(s.pipeline.filter)},
        {"pipeline", trajectory::pipeline_to_json(s.pipeline)},
        {"sim", sim::to_json(s.sim)},
        {"field", field::to_json(s.sim.field)},
        {"canvas", canvas::to_json(s.canvas)},
        {"seed", s.seed},
    };
    doc["obstacles"] = nlohmann::json::array();
    for (const auto& o : s.sim.obstacles) {
        doc["obstacles"].push_back(field::to_json(o));
    }
    if (const auto* shape = std::get_if<ShapeInput>(&s.input)) {
        nlohmann::json j = metrics::to_json(shape->shape);
        j["noise_px"] = shape->noise_px;
        j["rate_hz"] = shape->rate_hz;
        j["speed_px_s"] = shape->speed_px_s;
        doc["shape"] = j;
    } else if (const auto* stroke = std::get_if<trajectory::RawStroke>(&s.input)) {
        doc["stroke"] = nlohmann::json::array();
        for (const auto& p : stroke->points) {
            doc["stroke"].push_back({p.x, p.y, p.t});
        }
    } else {
        doc["file"] = std::get<FileInput>(s.input).path.string();
    }
    if (s.truth) {
        doc["truth"] = metrics::to_json(*s.truth);
    }
    return doc;
}

std::vector<trajectory::StrokePoint> synth_stroke(const ShapeInput& input, const trajectory::FlightZoneConfig& zone,
                                                  std::mt19937_64& rng) {
    std::vector<Vec2> screen;
    for (const Vec2& p : input.shape.polyline()) {
        screen.push_back(zone.to_screen(Vec3(p.x(), zone.depth, p.y())));
    }
    const double length = perimeter(screen);
    const double duration = length / input.speed_px_s;
    const double dt = 1.0 / input.rate_hz;

    std::vector<trajectory::StrokePoint> out;
    std::normal_distribution<double> noise(0.0, 1.0);
    auto emit = [&](double t) {
        const Vec2 p = point_at(screen, std::min(t * input.speed_px_s, length));
        const double nx = noise(rng) * input.noise_px;
        const double ny = noise(rng) * input.noise_px;
        out.push_back({p.x() + nx, p.y() + ny, t});
    };
    for (std::size_t k = 0;; ++k) {
        const double t = static_cast<double>(k) * dt;
        if (t >= duration) {
            break;
        }
        emit(t);
    }
    emit(duration);
    return out;
}

trajectory::RawStroke resolve_stroke(const Scenario& s, std::uint64_t seed) {
    if (const auto* shape = std::get_if<ShapeInput>(&s.input)) {
        std::mt19937_64 rng(seed);
        trajectory::RawStroke stroke;
        stroke.points = synth_stroke(*shape, s.pipeline.zone, rng);
        return stroke;
    }
    if (const auto* stroke = std::get_if<trajectory::RawStroke>(&s.input)) {
        return *stroke;
    }
    const auto file = trajectory::parse_trajectory_csv(util::read_file(std::get<FileInput>(s.input).path));
    trajectory::RawStroke stroke;
    stroke.points = trajectory::to_stroke(file);
    return stroke;
}

std::vector<metrics::TimedPoint2> painted_path(const sim::Trace& trace, const sim::SimConfig& config, int drone) {
    const Vec3 offset = config.offset_for(drone);
    std::vector<metrics::TimedPoint2> out;
    for (const auto& frame : trace) {
        for (const auto& d : frame.drones) {
            if (d.id != drone || (d.led.r <= 0.0 && d.led.g <= 0.0 && d.led.b <= 0.0)) {
                continue;
            }
            const Vec3 p = d.position - offset;
            out.push_back({Vec2(p.x(), p.z()), frame.t});
        }
    }
    return out;
}

SimulationResult simulate(const Scenario& s, std::uint64_t seed) {
    trajectory::RawStroke stroke = resolve_stroke(s, seed);
    sim::PaintPlan plan;

    nlohmann::json run_errors = nlohmann::json::array();
    std::vector<std::vector<trajectory::TimedWaypoint>> schedules;
    if (!stroke.empty()) {
        const auto outcomes = trajectory::process_runs(stroke, s.pipeline);
        for (std::size_t i = 0; i < outcomes.size(); ++i) {
            if (outcomes[i].error) {
                run_errors.push_back({{"run", i},
                                      {"code", to_string(outcomes[i].error->code())},
                                      {"reason", outcomes[i].error->what()}});
            } else {
                schedules.push_back(outcomes[i].schedule);
            }
        }
    }
    if (!schedules.empty()) {
        plan = sim::join_runs(schedules, s.pipeline.speed);
    }

    sim::SimConfig config = s.sim;
    config.seed = seed;
    sim::EpisodeResult episode = sim::run_episode(config, plan, s.pipeline.zone, s.canvas);

    const auto flown = painted_path(episode.trace, config, 0);
    std::vector<Vec2> planned;
    for (const auto& w : plan.waypoints) {
        planned.emplace_back(w.position.x(), w.position.z());
    }

    nlohmann::json report{
        {"format", "dronepaint-report"},
        {"version", 1},
        {"seed", seed},
        {"completed", episode.completed},
        {"runs", schedules.size()},
        {"failed_runs", run_errors},
        {"waypoints", plan.waypoints.size()},
        {"tracking", nullptr},
        {"truth", nullptr},
        {"drawn", nullptr},
        {"flown", nullptr},
    };
    if (planned.size() >= 2) {
        report["tracking"] = optional_report(flown, planned);
    }
    if (s.truth) {
        const auto truth = s.truth->polyline();
        report["truth"] = metrics::to_json(*s.truth);
        report["drawn"] = optional_report(plane_points(stroke, s.pipeline.zone), truth);
        report["flown"] = optional_report(flown, truth);
    }
    return {std::move(stroke), std::move(plan), std::move(episode), std::move(report)};
}

void write_artifacts(const SimulationResult& r, const canvas::CanvasConfig& canvas,
                     const std::filesystem::path& dir) {
    util::write_file(dir / "trace.csv", sim::write_trace_csv(r.episode.trace));
    util::write_file(dir / "events.jsonl", sim::write_events_jsonl(r.episode.events));
    const auto ppm = canvas::render(r.episode.painting, canvas.gain);
    util::write_file(dir / "painting.ppm", std::string(ppm.begin(), ppm.end()));
    util::write_file(dir / "report.json", r.report.dump(2) + "\n");
}

} // namespace dronepaint::scenario
