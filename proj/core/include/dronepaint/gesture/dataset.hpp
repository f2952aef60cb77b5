#pragma once

#include "dronepaint/gesture/hand.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dronepaint::gesture {

enum class Split { Train, Test };

struct Sample {
    HandFrame frame;
    GestureClass label = GestureClass::One;
    Split split = Split::Train;

    friend bool operator==(const Sample&, const Sample&) = default;
};

struct GestureDataset {
    std::vector<Sample> samples;

    std::size_t count(Split split) const;
    std::vector<const Sample*> select(Split split) const;
};

// Canonical pose for each class, built from a small articulated hand model
// placed in the lower middle of the image.
HandFrame canonical_pose(GestureClass g);

struct ClassSpec {
    std::string label;                // must name a GestureClass
    std::size_t count = 1000;
    std::optional<HandFrame> pose;    // defaults to canonical_pose(label)
};

struct DatasetSpec {
    std::vector<ClassSpec> classes;
    double sigma = 0.015;             // per-coordinate Gaussian jitter, normalized units
    double train_fraction = 0.8;

    // All eight classes, 1000 samples each.
    static DatasetSpec defaults();
};

// Deterministic for a fixed seed. Within each class the first
// round(train_fraction * count) samples are tagged Train, the rest Test.
GestureDataset synth_dataset(const DatasetSpec& spec, std::uint64_t seed);

// CSV: `label,split,x0,y0,z0,...,x20,y20,z20` with a header row.
std::string write_dataset_csv(const GestureDataset& data);
GestureDataset parse_dataset_csv(const std::string& text);

} // namespace dronepaint::gesture
