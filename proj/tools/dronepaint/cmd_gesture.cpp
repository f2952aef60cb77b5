#include "commands.hpp"

#include "dronepaint/error.hpp"
#include "dronepaint/gesture/classifier.hpp"
#include "dronepaint/gesture/dataset.hpp"
#include "dronepaint/gesture/features.hpp"
#include "dronepaint/util/text_io.hpp"

#include <cstdio>
#include <iostream>
#include <sstream>

namespace dronepaint::cli {

namespace {

namespace fs = std::filesystem;

gesture::DatasetSpec dataset_spec(const std::string& config) {
    gesture::DatasetSpec spec = gesture::DatasetSpec::defaults();
    if (config.empty()) {
        return spec;
    }
    const auto doc = read_json(config);
    try {
        spec.sigma = doc.value("sigma", spec.sigma);
        spec.train_fraction = doc.value("train_fraction", spec.train_fraction);
        if (doc.contains("count_per_class")) {
            const auto n = doc.at("count_per_class").get<std::size_t>();
            for (auto& c : spec.classes) {
                c.count = n;
            }
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ConfigError, std::string("dataset config: ") + e.what());
    }
    return spec;
}

gesture::GestureDataset load_or_synth(const std::string& data, std::uint64_t seed) {
    if (!data.empty()) {
        return gesture::parse_dataset_csv(util::read_file(data));
    }
    return gesture::synth_dataset(gesture::DatasetSpec::defaults(), seed);
}

void print_evaluation(const gesture::Evaluation& ev) {
    std::size_t correct = 0;
    for (std::size_t i = 0; i < gesture::kGestureCount; ++i) {
        correct += ev.confusion[i][i];
    }
    std::printf("accuracy: %.4f (%zu/%zu)\n", ev.accuracy, correct, ev.total);
    std::printf("%-10s", "true\\pred");
    for (auto g : gesture::kAllGestures) {
        std::printf(" %9s", std::string(gesture::to_string(g)).c_str());
    }
    std::printf("\n");
    for (std::size_t i = 0; i < gesture::kGestureCount; ++i) {
        std::printf("%-10s", std::string(gesture::to_string(gesture::kAllGestures[i])).c_str());
        for (std::size_t j = 0; j < gesture::kGestureCount; ++j) {
            std::printf(" %9zu", ev.confusion[i][j]);
        }
        std::printf("\n");
    }
}

std::vector<gesture::HandFrame> read_frames(const std::string& path) {
    const std::string text = util::read_file(path);
    std::vector<nlohmann::json> docs;
    try {
        auto doc = nlohmann::json::parse(text);
        if (doc.is_array() && !doc.empty() && doc.front().is_object()) {
            docs.assign(doc.begin(), doc.end());
        } else {
            docs.push_back(std::move(doc));
        }
    } catch (const nlohmann::json::exception&) {
        std::istringstream lines(text);
        std::string line;
        while (std::getline(lines, line)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) {
                continue;
            }
            try {
                docs.push_back(nlohmann::json::parse(line));
            } catch (const nlohmann::json::exception& e) {
                fail(ErrorCode::ParseError, path + ": " + e.what());
            }
        }
    }
    std::vector<gesture::HandFrame> frames;
    for (const auto& doc : docs) {
        if (!doc.is_object() || !doc.contains("landmarks") || !doc.at("landmarks").is_array()) {
            fail(ErrorCode::ParseError, "frame must be an object with 'landmarks'");
        }
        std::vector<gesture::Landmark> lms;
        for (const auto& p : doc.at("landmarks")) {
            if (!p.is_array() || p.size() != 3) {
                fail(ErrorCode::ParseError, "landmark must be [x, y, z]");
            }
            lms.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>()});
        }
        frames.push_back(gesture::make_frame(lms, doc.value("t", 0.0)));
    }
    return frames;
}

} // namespace

Action register_synth_data(CLI::App& app) {
    auto* cmd = app.add_subcommand("synth-data", "Generate the synthetic landmark dataset (CSV)");
    struct Opts {
        std::uint64_t seed = 42;
        std::string out = "out";
        std::string config;
    };
    auto o = std::make_shared<Opts>();
    cmd->add_option("--seed", o->seed, "Random seed")->capture_default_str();
    cmd->add_option("--out", o->out, "Output directory (writes dataset.csv)")->capture_default_str();
    cmd->add_option("--config", o->config, "JSON with sigma, train_fraction, count_per_class");
    return [o] {
        const auto data = gesture::synth_dataset(dataset_spec(o->config), o->seed);
        const fs::path path = fs::path(o->out) / "dataset.csv";
        util::write_file(path, gesture::write_dataset_csv(data));
        std::printf("wrote %s: %zu train, %zu test samples\n", path.c_str(), data.count(gesture::Split::Train),
                    data.count(gesture::Split::Test));
        return 0;
    };
}

Action register_train(CLI::App& app) {
    auto* cmd = app.add_subcommand("train", "Train the gesture classifier");
    struct Opts {
        std::uint64_t seed = 42;
        std::string out = "out";
        std::string data;
        std::string config;
        int epochs = 0;
    };
    auto o = std::make_shared<Opts>();
    cmd->add_option("--seed", o->seed, "Seed for data synthesis, init and shuffling")->capture_default_str();
    cmd->add_option("--out", o->out, "Output directory (writes model.json)")->capture_default_str();
    cmd->add_option("--data", o->data, "Dataset CSV (default: synthesize with --seed)")->check(CLI::ExistingFile);
    cmd->add_option("--config", o->config, "JSON with hidden, epochs, batch_size, learning_rate")
        ->check(CLI::ExistingFile);
    cmd->add_option("--epochs", o->epochs, "Override the epoch count");
    return [o] {
        gesture::Hyperparameters hyper;
        if (!o->config.empty()) {
            const auto doc = read_json(o->config);
            try {
                hyper.hidden = doc.value("hidden", hyper.hidden);
                hyper.epochs = doc.value("epochs", hyper.epochs);
                hyper.batch_size = doc.value("batch_size", hyper.batch_size);
                hyper.learning_rate = doc.value("learning_rate", hyper.learning_rate);
            } catch (const nlohmann::json::exception& e) {
                fail(ErrorCode::ConfigError, std::string("training config: ") + e.what());
            }
        }
        if (o->epochs > 0) {
            hyper.epochs = o->epochs;
        }
        const auto data = load_or_synth(o->data, o->seed);
        const auto model = gesture::train_classifier(data, hyper, o->seed);
        const fs::path path = fs::path(o->out) / "model.json";
        util::write_file(path, gesture::write_model_json(model));
        const auto& meta = model.metadata;
        std::printf("epochs: %d\n", meta.epochs);
        if (!meta.train_loss.empty()) {
            std::printf("final train loss: %.6g\n", meta.train_loss.back());
        }
        if (!meta.test_loss.empty()) {
            std::printf("final test loss: %.6g\n", meta.test_loss.back());
        }
        if (meta.degenerate_training) {
            std::printf("warning: training was degenerate (single class)\n");
        }
        if (data.count(gesture::Split::Test) > 0) {
            std::printf("held-out accuracy: %.4f\n", gesture::evaluate(model, data, gesture::Split::Test).accuracy);
        }
        std::printf("checksum: %s\nwrote %s\n", model.checksum().c_str(), path.c_str());
        return 0;
    };
}

Action register_eval(CLI::App& app) {
    auto* cmd = app.add_subcommand("eval", "Evaluate a trained model on the held-out split");
    struct Opts {
        std::uint64_t seed = 42;
        std::string out = "out";
        std::string model;
        std::string data;
        bool train_split = false;
    };
    auto o = std::make_shared<Opts>();
    cmd->add_option("--seed", o->seed, "Seed for the synthesized dataset")->capture_default_str();
    cmd->add_option("--out", o->out, "Directory holding model.json")->capture_default_str();
    cmd->add_option("--model", o->model, "Model file (default: <out>/model.json)");
    cmd->add_option("--data", o->data, "Dataset CSV (default: synthesize with --seed)")->check(CLI::ExistingFile);
    cmd->add_flag("--train-split", o->train_split, "Evaluate on the training split instead");
    return [o] {
        const fs::path model_path = o->model.empty() ? fs::path(o->out) / "model.json" : fs::path(o->model);
        const auto model = gesture::parse_model_json(util::read_file(model_path));
        const auto data = load_or_synth(o->data, o->seed);
        print_evaluation(gesture::evaluate(model, data, o->train_split ? gesture::Split::Train : gesture::Split::Test));
        return 0;
    };
}

Action register_classify(CLI::App& app) {
    auto* cmd = app.add_subcommand("classify", "Classify hand frames (JSON, JSON array or NDJSON of {landmarks, t})");
    struct Opts {
        std::string frames;
        std::string out = "out";
        std::string model;
    };
    auto o = std::make_shared<Opts>();
    cmd->add_option("frames", o->frames, "Frame file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", o->out, "Directory holding model.json")->capture_default_str();
    cmd->add_option("--model", o->model, "Model file (default: <out>/model.json)");
    return [o] {
        const fs::path model_path = o->model.empty() ? fs::path(o->out) / "model.json" : fs::path(o->model);
        const auto model = gesture::parse_model_json(util::read_file(model_path));
        for (const auto& frame : read_frames(o->frames)) {
            const auto pred = gesture::classify(model, gesture::extract_features(frame));
            std::printf("%s %.6f\n", std::string(gesture::to_string(pred.label)).c_str(), pred.confidence);
        }
        return 0;
    };
}

} // namespace dronepaint::cli
