#include "dronepaint/trajectory/trajectory_io.hpp"

#include "dronepaint/util/text_io.hpp"

#include <sstream>

namespace dronepaint::trajectory {

std::string write_trajectory_csv(const TrajectoryFile& file) {
    std::string out = file.has_z ? "x,y,z,t\n" : "x,y,t\n";
    for (std::size_t i = 0; i < file.points.size(); ++i) {
        const auto& p = file.points[i];
        out += util::format_double(p.x()) + ',' + util::format_double(p.y()) + ',';
        if (file.has_z) {
            out += util::format_double(p.z()) + ',';
        }
        out += util::format_double(file.t[i]) + '\n';
    }
    return out;
}

TrajectoryFile parse_trajectory_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) {
        fail(ErrorCode::ParseError, "trajectory: missing header");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    TrajectoryFile file;
    if (line == "x,y,z,t") {
        file.has_z = true;
    } else if (line != "x,y,t") {
        fail(ErrorCode::ParseError, "trajectory: header must be x,y,t or x,y,z,t");
    }
    const std::size_t columns = file.has_z ? 4 : 3;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        std::vector<double> v;
        std::istringstream row(line);
        std::string cell;
        try {
            while (std::getline(row, cell, ',')) {
                std::size_t used = 0;
                v.push_back(std::stod(cell, &used));
                if (used != cell.size()) {
                    throw std::invalid_argument(cell);
                }
            }
        } catch (const std::exception&) {
            fail(ErrorCode::ParseError, "trajectory line " + std::to_string(line_no) + ": bad number");
        }
        if (v.size() != columns) {
            fail(ErrorCode::ParseError, "trajectory line " + std::to_string(line_no) +
                                            ": expected " + std::to_string(columns) + " columns");
        }
        file.points.emplace_back(v[0], v[1], file.has_z ? v[2] : 0.0);
        file.t.push_back(v.back());
    }
    return file;
}

TrajectoryFile from_stroke(std::span<const StrokePoint> stroke) {
    TrajectoryFile file;
    for (const auto& s : stroke) {
        file.points.emplace_back(s.x, s.y, 0.0);
        file.t.push_back(s.t);
    }
    return file;
}

std::vector<StrokePoint> to_stroke(const TrajectoryFile& file) {
    std::vector<StrokePoint> out;
    for (std::size_t i = 0; i < file.points.size(); ++i) {
        out.push_back({file.points[i].x(), file.points[i].y(), file.t[i]});
    }
    return out;
}

TrajectoryFile from_schedule(std::span<const TimedWaypoint> schedule) {
    TrajectoryFile file;
    file.has_z = true;
    for (const auto& w : schedule) {
        file.points.push_back(w.position);
        file.t.push_back(w.dispatch_offset);
    }
    return file;
}

} // namespace dronepaint::trajectory
