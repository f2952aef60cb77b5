#include "dronepaint/gesture/dataset.hpp"

#include "dronepaint/error.hpp"
#include "dronepaint/util/text_io.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace dronepaint::gesture {

namespace {

// Hand model in a palm-aligned frame: +y from wrist towards the fingers,
// +x towards the pinky, -z towards the camera. Unit = wrist to middle base.
struct FingerModel {
    Vec3 base;
    Vec3 direction;
    std::array<double, 3> bones;
};

const std::array<FingerModel, 5> kFingers = {{
    {{-0.30, 0.30, 0.0}, {-0.62, 0.78, 0.0}, {0.34, 0.30, 0.24}}, // thumb, from CMC
    {{-0.30, 0.95, 0.0}, {-0.12, 1.00, 0.0}, {0.45, 0.27, 0.22}},
    {{0.00, 1.00, 0.0}, {0.00, 1.00, 0.0}, {0.50, 0.30, 0.24}},
    {{0.26, 0.93, 0.0}, {0.10, 1.00, 0.0}, {0.46, 0.28, 0.22}},
    {{0.48, 0.80, 0.0}, {0.24, 1.00, 0.0}, {0.36, 0.22, 0.20}},
}};

constexpr double deg(double d) { return d * std::numbers::pi / 180.0; }

// Cumulative flexion (radians) at each of the three joints of a finger.
using Flexion = std::array<double, 3>;
constexpr Flexion kStraight = {0.0, 0.0, 0.0};
constexpr Flexion kCurled = {deg(75), deg(170), deg(230)};
constexpr Flexion kThumbFolded = {deg(20), deg(55), deg(95)};

void place_finger(std::array<Vec3, kLandmarkCount>& out, std::size_t finger, const Flexion& flex,
                  const Vec3& direction) {
    const auto& model = kFingers[finger];
    const Vec3 toward_palm(0.0, 0.0, -1.0);
    const Vec3 d0 = direction.normalized();
    const std::size_t first = 1 + 4 * finger;
    Vec3 at = model.base;
    out[first] = at;
    for (std::size_t j = 0; j < 3; ++j) {
        const Vec3 d = std::cos(flex[j]) * d0 + std::sin(flex[j]) * toward_palm;
        at += model.bones[j] * d;
        out[first + j + 1] = at;
    }
}

HandFrame to_image(const std::array<Vec3, kLandmarkCount>& local) {
    // Wrist near the bottom middle of the image, palm about a quarter of the frame high.
    constexpr double kScale = 0.22;
    constexpr double kWristX = 0.5;
    constexpr double kWristY = 0.82;
    HandFrame frame;
    for (std::size_t i = 0; i < kLandmarkCount; ++i) {
        frame.landmarks[i] = {kWristX + kScale * local[i].x(), kWristY - kScale * local[i].y(),
                              kScale * local[i].z()};
    }
    return frame;
}

} // namespace

HandFrame canonical_pose(GestureClass g) {
    std::array<Vec3, kLandmarkCount> p;
    p[0] = Vec3::Zero();

    // extended[finger] for thumb, index, middle, ring, pinky
    std::array<bool, 5> extended{};
    switch (g) {
    case GestureClass::One: extended = {false, true, false, false, false}; break;
    case GestureClass::Two: extended = {false, true, true, false, false}; break;
    case GestureClass::Three: extended = {false, true, true, true, false}; break;
    case GestureClass::Four: extended = {false, true, true, true, true}; break;
    case GestureClass::Five: extended = {true, true, true, true, true}; break;
    case GestureClass::Okay: extended = {false, false, true, true, true}; break;
    case GestureClass::Rock: extended = {false, true, false, false, true}; break;
    case GestureClass::ThumbsUp: extended = {true, false, false, false, false}; break;
    }

    for (std::size_t f = 1; f < 5; ++f) {
        place_finger(p, f, extended[f] ? kStraight : kCurled, kFingers[f].direction);
    }

    if (g == GestureClass::ThumbsUp) {
        place_finger(p, 0, kStraight, Vec3(-0.25, 1.0, 0.0));
    } else if (extended[0]) {
        place_finger(p, 0, kStraight, kFingers[0].direction);
    } else {
        place_finger(p, 0, kThumbFolded, Vec3(0.75, 0.65, 0.0));
    }

    if (g == GestureClass::Okay) {
        // Index bends half way; thumb arcs from its base to meet the index tip.
        place_finger(p, 1, {deg(40), deg(95), deg(140)}, kFingers[1].direction);
        const Vec3 start = p[1];
        const Vec3 tip = p[landmark::kIndexTip];
        const Vec3 bulge(-0.12, -0.05, -0.05);
        for (std::size_t j = 1; j <= 3; ++j) {
            const double u = static_cast<double>(j) / 3.0;
            p[1 + j] = start + u * (tip - start) + 4.0 * u * (1.0 - u) * bulge;
        }
    }

    return to_image(p);
}

std::size_t GestureDataset::count(Split split) const {
    std::size_t n = 0;
    for (const auto& s : samples) {
        n += s.split == split ? 1 : 0;
    }
    return n;
}

std::vector<const Sample*> GestureDataset::select(Split split) const {
    std::vector<const Sample*> out;
    for (const auto& s : samples) {
        if (s.split == split) {
            out.push_back(&s);
        }
    }
    return out;
}

DatasetSpec DatasetSpec::defaults() {
    DatasetSpec spec;
    for (GestureClass g : kAllGestures) {
        spec.classes.push_back({std::string(to_string(g)), 1000, std::nullopt});
    }
    return spec;
}

GestureDataset synth_dataset(const DatasetSpec& spec, std::uint64_t seed) {
    if (!(spec.sigma >= 0.0)) {
        fail(ErrorCode::ConfigError, "jitter sigma must be >= 0");
    }
    if (!(spec.train_fraction >= 0.0 && spec.train_fraction <= 1.0)) {
        fail(ErrorCode::ConfigError, "train fraction must be in [0, 1]");
    }
    struct Resolved {
        GestureClass label;
        std::size_t count;
        HandFrame pose;
    };
    std::vector<Resolved> classes;
    for (const auto& c : spec.classes) {
        const auto label = gesture_from_string(c.label);
        if (!label) {
            fail(ErrorCode::ConfigError, "unknown gesture class '" + c.label + "'");
        }
        if (c.count == 0) {
            fail(ErrorCode::ConfigError, "class '" + c.label + "' needs a positive count");
        }
        classes.push_back({*label, c.count, c.pose.value_or(canonical_pose(*label))});
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> jitter(0.0, 1.0);

    GestureDataset data;
    for (const auto& c : classes) {
        const auto n_train =
            static_cast<std::size_t>(std::llround(spec.train_fraction * static_cast<double>(c.count)));
        for (std::size_t k = 0; k < c.count; ++k) {
            Sample s{c.pose, c.label, k < n_train ? Split::Train : Split::Test};
            if (spec.sigma > 0.0) {
                for (auto& lm : s.frame.landmarks) {
                    lm.x += spec.sigma * jitter(rng);
                    lm.y += spec.sigma * jitter(rng);
                    lm.z += spec.sigma * jitter(rng);
                }
            }
            s.frame.timestamp = 0.0;
            data.samples.push_back(s);
        }
    }
    return data;
}

std::string write_dataset_csv(const GestureDataset& data) {
    std::string out = "label,split";
    for (std::size_t i = 0; i < kLandmarkCount; ++i) {
        const auto idx = std::to_string(i);
        out += ",x" + idx + ",y" + idx + ",z" + idx;
    }
    out += '\n';
    for (const auto& s : data.samples) {
        out += to_string(s.label);
        out += s.split == Split::Train ? ",train" : ",test";
        for (const auto& lm : s.frame.landmarks) {
            out += ',' + util::format_double(lm.x);
            out += ',' + util::format_double(lm.y);
            out += ',' + util::format_double(lm.z);
        }
        out += '\n';
    }
    return out;
}

GestureDataset parse_dataset_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.rfind("label,split", 0) != 0) {
        fail(ErrorCode::ParseError, "dataset: missing header");
    }
    GestureDataset data;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> cells;
        std::istringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ',')) {
            cells.push_back(cell);
        }
        const auto where = "dataset line " + std::to_string(line_no);
        if (cells.size() != 2 + 3 * kLandmarkCount) {
            fail(ErrorCode::ParseError, where + ": expected 65 columns");
        }
        const auto label = gesture_from_string(cells[0]);
        if (!label) {
            fail(ErrorCode::ParseError, where + ": unknown label '" + cells[0] + "'");
        }
        Sample s;
        s.label = *label;
        if (cells[1] == "train") {
            s.split = Split::Train;
        } else if (cells[1] == "test") {
            s.split = Split::Test;
        } else {
            fail(ErrorCode::ParseError, where + ": split must be train or test");
        }
        try {
            for (std::size_t i = 0; i < kLandmarkCount; ++i) {
                s.frame.landmarks[i] = {std::stod(cells[2 + 3 * i]), std::stod(cells[3 + 3 * i]),
                                        std::stod(cells[4 + 3 * i])};
            }
        } catch (const std::exception&) {
            fail(ErrorCode::ParseError, where + ": bad number");
        }
        data.samples.push_back(s);
    }
    return data;
}

} // namespace dronepaint::gesture
