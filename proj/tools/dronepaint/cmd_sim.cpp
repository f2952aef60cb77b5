#include "commands.hpp"

#include "dronepaint/error.hpp"
#include "dronepaint/scenario/scenario.hpp"
#include "dronepaint/util/digest.hpp"
#include "dronepaint/util/text_io.hpp"

#include <cstdio>

namespace dronepaint::cli {

namespace {

namespace fs = std::filesystem;

} // namespace

Action register_simulate(CLI::App& app) {
    auto* cmd = app.add_subcommand("simulate", "Run a scenario: trace.csv, events.jsonl, painting.ppm, report.json");
    struct Opts {
        std::string scenario;
        std::optional<std::uint64_t> seed;
        std::string out = "out";
    };
    auto o = std::make_shared<Opts>();
    cmd->add_option("scenario", o->scenario, "Scenario file (JSON)")->check(CLI::ExistingFile);
    cmd->add_option("--seed", o->seed, "Seed (default: the scenario's seed)");
    cmd->add_option("--out", o->out, "Output directory")->capture_default_str();
    cmd->add_option("--config", o->scenario, "Scenario file (same as the positional argument)")
        ->check(CLI::ExistingFile);
    return [o] {
        if (o->scenario.empty()) {
            fail(ErrorCode::ConfigError, "simulate needs a scenario file");
        }
        const fs::path path = o->scenario;
        const auto s = scenario::parse_scenario(util::read_file(path), path.parent_path());
        const std::uint64_t seed = o->seed.value_or(s.seed);
        const auto result = scenario::simulate(s, seed);
        scenario::write_artifacts(result, s.canvas, o->out);

        const auto trace_csv = util::read_file(fs::path(o->out) / "trace.csv");
        const auto ppm = util::read_file(fs::path(o->out) / "painting.ppm");
        std::printf("seed: %llu\n", static_cast<unsigned long long>(seed));
        std::printf("waypoints: %zu, frames: %zu, events: %zu, completed: %s\n", result.plan.waypoints.size(),
                    result.episode.trace.size(), result.episode.events.size(),
                    result.episode.completed ? "yes" : "no");
        for (const char* key : {"tracking", "drawn", "flown"}) {
            const auto& r = result.report.at(key);
            if (!r.is_null()) {
                std::printf("%-8s mean %.2f cm, max %.2f cm, rmse %.2f cm\n", key, r.at("mean_error_cm").get<double>(),
                            r.at("max_error_cm").get<double>(), r.at("rmse_cm").get<double>());
            }
        }
        std::printf("trace sha256: %s\n", util::sha256_hex(trace_csv).c_str());
        std::printf("painting sha256: %s\n", util::sha256_hex(ppm).c_str());
        std::printf("wrote %s\n", o->out.c_str());
        return result.episode.completed ? 0 : 1;
    };
}

Action register_render(CLI::App& app) {
    auto* cmd = app.add_subcommand("render", "Re-expose a trace CSV into a long-exposure P6 painting");
    struct Opts {
        std::string trace;
        std::string config;
        std::string out = "out";
        std::optional<double> gain;
    };
    auto o = std::make_shared<Opts>();
    cmd->add_option("trace", o->trace, "Trace CSV (t,drone_id,x,y,z,vx,vy,vz,led_r,led_g,led_b)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--config", o->config, "Scenario or JSON with 'zone' and 'canvas'")->check(CLI::ExistingFile);
    cmd->add_option("--out", o->out, "Output directory (writes painting.ppm)")->capture_default_str();
    cmd->add_option("--gain", o->gain, "Exposure gain override");
    return [o] {
        trajectory::FlightZoneConfig zone;
        canvas::CanvasConfig cfg;
        if (!o->config.empty()) {
            const auto doc = read_json(o->config);
            if (doc.contains("zone")) {
                zone = trajectory::zone_from_json(doc.at("zone"));
            }
            if (doc.contains("canvas")) {
                cfg = canvas::canvas_from_json(doc.at("canvas"));
            }
        }
        if (o->gain) {
            cfg.gain = *o->gain;
        }
        canvas::validate(cfg);
        const auto trace = sim::parse_trace_csv(util::read_file(o->trace));
        canvas::ExposureCanvas painting(cfg.width, cfg.height, zone);
        for (const auto& frame : trace) {
            for (const auto& d : frame.drones) {
                if (d.led.r > 0.0 || d.led.g > 0.0 || d.led.b > 0.0) {
                    painting.accumulate(d.position, d.led, cfg.intensity, cfg.sigma_px);
                }
            }
        }
        const auto ppm = canvas::render(painting, cfg.gain);
        const fs::path path = fs::path(o->out) / "painting.ppm";
        util::write_file(path, std::string(ppm.begin(), ppm.end()));
        std::printf("painting sha256: %s\nwrote %s\n", util::sha256_hex(ppm).c_str(), path.c_str());
        return 0;
    };
}

} // namespace dronepaint::cli
