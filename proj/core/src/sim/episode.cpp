#include "dronepaint/sim/episode.hpp"

#include "dronepaint/error.hpp"
#include "dronepaint/util/text_io.hpp"

#include <cmath>
#include <functional>
#include <sstream>

namespace dronepaint::sim {

TraceFrame capture(const World& world) {
    TraceFrame frame;
    frame.t = world.time();
    for (const auto& d : world.drones()) {
        frame.drones.push_back({d.id, d.position, d.velocity, d.led_on ? d.led : Rgb{}});
    }
    return frame;
}

void expose(canvas::ExposureCanvas& canvas, const World& world, const canvas::CanvasConfig& cfg) {
    for (const auto& d : world.drones()) {
        if (d.led_on) {
            canvas.accumulate(d.position, d.led, cfg.intensity, cfg.sigma_px);
        }
    }
}

EpisodeResult run_episode(const SimConfig& config, const PaintPlan& plan,
                          const trajectory::FlightZoneConfig& zone, const canvas::CanvasConfig& cfg) {
    canvas::validate(cfg);
    World world(config);
    EpisodeResult result{{}, {}, canvas::ExposureCanvas(cfg.width, cfg.height, zone), true};
    result.trace.push_back(capture(world));

    auto advance = [&] {
        auto events = world.step();
        result.events.insert(result.events.end(), events.begin(), events.end());
        expose(result.painting, world, cfg);
        result.trace.push_back(capture(world));
    };
    auto run_until = [&](const std::function<bool()>& done, double timeout) {
        const auto max_steps = static_cast<long>(std::ceil(timeout / config.dt));
        for (long k = 0; k < max_steps && !done(); ++k) {
            advance();
        }
        const bool ok = done();
        result.completed = result.completed && ok;
        return ok;
    };
    auto hold = [&](double seconds) {
        const auto steps = static_cast<long>(std::lround(seconds / config.dt));
        for (long k = 0; k < steps; ++k) {
            advance();
        }
    };

    world.take_off();
    run_until([&] { return world.all_within(config.arrival_tolerance); }, 15.0);
    hold(0.5);
    if (!plan.empty()) {
        world.begin_paint(plan);
        run_until([&] { return world.phase() == SwarmPhase::Done; },
                  config.approach_timeout + plan.duration() + 30.0);
        hold(0.5);
    } else {
        hold(1.0);
    }
    world.land();
    run_until([&] { return world.all_grounded(); }, 30.0);
    return result;
}

double min_separation(const Trace& trace) {
    double best = std::numeric_limits<double>::infinity();
    bool any_pair = false;
    for (const auto& frame : trace) {
        for (std::size_t a = 0; a < frame.drones.size(); ++a) {
            for (std::size_t b = a + 1; b < frame.drones.size(); ++b) {
                any_pair = true;
                best = std::min(best, (frame.drones[a].position - frame.drones[b].position).norm());
            }
        }
    }
    if (!any_pair) {
        fail(ErrorCode::ConfigError, "min_separation needs at least two drones");
    }
    return best;
}

std::string write_trace_csv(const Trace& trace) {
    using util::format_double;
    std::string out = "t,drone_id,x,y,z,vx,vy,vz,led_r,led_g,led_b\n";
    for (const auto& frame : trace) {
        const std::string t = format_double(frame.t);
        for (const auto& d : frame.drones) {
            out += t + ',' + std::to_string(d.id);
            for (int i = 0; i < 3; ++i) {
                out += ',' + format_double(d.position[i]);
            }
            for (int i = 0; i < 3; ++i) {
                out += ',' + format_double(d.velocity[i]);
            }
            out += ',' + format_double(d.led.r) + ',' + format_double(d.led.g) + ',' +
                   format_double(d.led.b) + '\n';
        }
    }
    return out;
}

Trace parse_trace_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.rfind("t,drone_id,", 0) != 0) {
        fail(ErrorCode::ParseError, "trace: missing header");
    }
    Trace trace;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        std::vector<double> v;
        std::istringstream row(line);
        std::string cell;
        try {
            while (std::getline(row, cell, ',')) {
                v.push_back(std::stod(cell));
            }
        } catch (const std::exception&) {
            fail(ErrorCode::ParseError, "trace line " + std::to_string(line_no) + ": bad number");
        }
        if (v.size() != 11) {
            fail(ErrorCode::ParseError, "trace line " + std::to_string(line_no) + ": expected 11 columns");
        }
        if (trace.empty() || trace.back().t != v[0]) {
            trace.push_back({v[0], {}});
        }
        trace.back().drones.push_back({static_cast<int>(v[1]), Vec3(v[2], v[3], v[4]),
                                       Vec3(v[5], v[6], v[7]), Rgb{v[8], v[9], v[10]}});
    }
    return trace;
}

std::string write_events_jsonl(const std::vector<SimEvent>& events) {
    std::string out;
    for (const auto& e : events) {
        out += to_json_line(e) + '\n';
    }
    return out;
}

} // namespace dronepaint::sim
