#include "commands.hpp"

#include "dronepaint/error.hpp"
#include "dronepaint/metrics/statistics.hpp"
#include "dronepaint/metrics/trace_error.hpp"
#include "dronepaint/trajectory/trajectory_io.hpp"
#include "dronepaint/util/text_io.hpp"

#include <cctype>
#include <cstdio>
#include <iostream>
#include <map>

namespace dronepaint::cli {

namespace {

namespace fs = std::filesystem;

struct Column {
    metrics::GroundTruthShape shape;
    std::string label;
    std::string method;
    fs::path file;
    fs::path stored; // optional stored report
};

std::string title_case(std::string_view s) {
    std::string out(s);
    if (!out.empty()) {
        out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
    }
    return out;
}

// Plane coordinates: (x, y) of 2D files, (x, z) of 3D files, or pixels through the zone.
std::vector<metrics::TimedPoint2> load_drawn(const fs::path& file, const std::optional<trajectory::FlightZoneConfig>& px_zone) {
    const auto traj = trajectory::parse_trajectory_csv(util::read_file(file));
    std::vector<metrics::TimedPoint2> out;
    out.reserve(traj.points.size());
    for (std::size_t i = 0; i < traj.points.size(); ++i) {
        const Vec3& p = traj.points[i];
        Vec2 q;
        if (px_zone) {
            const Vec3 w = px_zone->to_world(Vec2(p.x(), p.y()));
            q = Vec2(w.x(), w.z());
        } else {
            q = traj.has_z ? Vec2(p.x(), p.z()) : Vec2(p.x(), p.y());
        }
        out.push_back({q, traj.t[i]});
    }
    return out;
}

std::vector<double> sample_errors(std::span<const metrics::TimedPoint2> drawn, const metrics::GroundTruthShape& shape) {
    const auto poly = shape.polyline();
    std::vector<double> errors;
    errors.reserve(drawn.size());
    for (const auto& s : drawn) {
        errors.push_back(100.0 * metrics::point_to_polyline(s.p, poly));
    }
    return errors;
}

std::vector<Column> read_manifest(const fs::path& path) {
    const auto doc = read_json(path);
    if (doc.value("format", std::string{}) != "dronepaint-table" || doc.value("version", 0) != 1) {
        fail(ErrorCode::ConfigError, "manifest must have format \"dronepaint-table\", version 1");
    }
    std::vector<Column> columns;
    const fs::path base = path.parent_path();
    try {
        for (const auto& c : doc.at("columns")) {
            Column col;
            col.shape = metrics::shape_from_json(c.at("shape"));
            col.label = c.value("label", title_case(metrics::to_string(col.shape.kind)));
            col.method = c.at("method").get<std::string>();
            col.file = base / c.at("file").get<std::string>();
            if (c.contains("report")) {
                col.stored = base / c.at("report").get<std::string>();
            }
            columns.push_back(std::move(col));
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ConfigError, std::string("manifest: ") + e.what());
    }
    return columns;
}

} // namespace

Action register_metrics(CLI::App& app) {
    auto* cmd = app.add_subcommand("metrics", "Trace error of drawn trajectories against ground-truth shapes");
    struct Opts {
        std::vector<std::string> files;
        std::string shape = "square";
        std::optional<double> side;
        std::optional<double> radius;
        std::vector<double> center;
        std::string method = "H";
        std::string manifest;
        std::string config;
        std::string out;
        bool pixels = false;
        bool json = false;
        bool check = false;
    };
    auto o = std::make_shared<Opts>();
    cmd->add_option("files", o->files, "Trajectory CSV files (x,y,t or x,y,z,t)")->check(CLI::ExistingFile);
    cmd->add_option("--shape", o->shape, "square | circle | triangle")
        ->check(CLI::IsMember({"square", "circle", "triangle"}))
        ->capture_default_str();
    cmd->add_option("--side", o->side, "Square/triangle side, m (default 1)");
    cmd->add_option("--radius", o->radius, "Circle radius, m (default 0.5)");
    cmd->add_option("--center", o->center, "Shape center x,z in m (default 0,1.5)")->expected(2)->delimiter(',');
    cmd->add_option("--method", o->method, "Column label for the input method")->capture_default_str();
    cmd->add_option("--manifest", o->manifest, "Grid manifest (JSON) of shape x method columns")
        ->check(CLI::ExistingFile);
    cmd->add_flag("--pixels", o->pixels, "Inputs are screen pixels; map them through the flight zone");
    cmd->add_option("--config", o->config, "JSON with a 'zone' used by --pixels")->check(CLI::ExistingFile);
    cmd->add_option("--out", o->out, "Directory for per-column report JSON files");
    cmd->add_flag("--json", o->json, "Print reports as JSON instead of the table");
    cmd->add_flag("--check", o->check, "With --manifest: compare against the stored reports (exit 1 on mismatch)");
    return [o] {
        std::optional<trajectory::FlightZoneConfig> px_zone;
        if (o->pixels) {
            px_zone = trajectory::FlightZoneConfig{};
            if (!o->config.empty()) {
                const auto doc = read_json(o->config);
                if (doc.contains("zone")) {
                    px_zone = trajectory::zone_from_json(doc.at("zone"));
                }
            }
        }

        std::vector<Column> columns;
        if (!o->manifest.empty()) {
            columns = read_manifest(o->manifest);
        } else {
            if (o->files.empty()) {
                fail(ErrorCode::ConfigError, "metrics needs trajectory files or --manifest");
            }
            metrics::GroundTruthShape shape;
            shape.kind = *metrics::shape_from_string(o->shape);
            shape.size = shape.kind == metrics::ShapeKind::Circle ? o->radius.value_or(0.5) : o->side.value_or(1.0);
            if (o->center.size() == 2) {
                shape.center = Vec2(o->center[0], o->center[1]);
            }
            metrics::validate(shape);
            for (const auto& f : o->files) {
                columns.push_back({shape, title_case(o->shape), o->method, f, {}});
            }
        }

        std::vector<metrics::TableColumn> table;
        std::map<std::string, std::vector<std::vector<double>>> by_method;
        nlohmann::json reports = nlohmann::json::array();
        int mismatches = 0;
        for (const auto& col : columns) {
            const auto drawn = load_drawn(col.file, px_zone);
            const auto report = metrics::trace_errors(drawn, col.shape);
            table.push_back({col.label, col.method, report});
            by_method[col.method].push_back(sample_errors(drawn, col.shape));
            nlohmann::json j = metrics::to_json(report);
            reports.push_back({{"shape", metrics::to_json(col.shape)},
                               {"method", col.method},
                               {"file", col.file.filename().string()},
                               {"report", j}});
            if (!o->out.empty()) {
                const std::string name = col.file.stem().string() + ".report.json";
                util::write_file(fs::path(o->out) / name, j.dump(2) + "\n");
            }
            if (o->check && !col.stored.empty()) {
                const auto stored = metrics::report_from_json(read_json(col.stored));
                if (!(stored == report)) {
                    ++mismatches;
                    std::cerr << "mismatch: " << col.file.filename().string() << " differs from "
                              << col.stored.filename().string() << "\n";
                }
            }
        }

        if (o->json) {
            std::cout << reports.dump(2) << "\n";
        } else {
            std::cout << metrics::format_table(table);
            for (const auto& [method, groups] : by_method) {
                std::vector<double> pooled;
                for (const auto& g : groups) {
                    pooled.insert(pooled.end(), g.begin(), g.end());
                }
                const auto ci = metrics::confidence_interval(pooled);
                std::printf("%s: overall mean error %.2f cm (95%% CI, %.2f cm to %.2f cm), n = %zu\n", method.c_str(),
                            metrics::mean(pooled), ci.lo, ci.hi, pooled.size());
                if (groups.size() >= 2) {
                    const auto a = metrics::anova_oneway(groups);
                    std::printf("%s: one-way ANOVA across columns F = %.3f, p-value = %.3g\n", method.c_str(), a.f, a.p);
                }
            }
        }
        if (o->check) {
            std::printf("check: %d of %zu columns differ from stored reports\n", mismatches, columns.size());
        }
        return mismatches == 0 ? 0 : 1;
    };
}

} // namespace dronepaint::cli
