#pragma once

#include "dronepaint/gesture/dataset.hpp"
#include "dronepaint/gesture/features.hpp"

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace dronepaint::gesture {

struct DenseLayer {
    Eigen::MatrixXd weights; // outputs x inputs
    Eigen::VectorXd bias;
};

struct TrainingMetadata {
    std::uint64_t seed = 0;
    int epochs = 0;
    int batch_size = 0;
    double learning_rate = 0.0;
    std::vector<double> train_loss; // one entry per epoch
    std::vector<double> test_loss;  // empty when there is no test split
    bool degenerate_training = false;
};

// Feed-forward network: ReLU on hidden layers, softmax over the last layer.
struct GestureModel {
    std::vector<DenseLayer> layers;
    TrainingMetadata metadata;

    std::size_t input_width() const;
    std::size_t output_width() const;

    // Raw logits; throws ModelError on width mismatch.
    Eigen::VectorXd logits(std::span<const double> features) const;

    // SHA-256 over the row-major weights and biases of every layer.
    std::string checksum() const;
};

struct Hyperparameters {
    std::vector<int> hidden = {64, 32};
    int epochs = 100;
    int batch_size = 32;
    double learning_rate = 1e-3;
};

// Mini-batch Adam on mean cross-entropy. Single-threaded and bit-reproducible
// for a fixed seed.
struct Gradients {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
    double loss = 0.0; // mean cross-entropy over the batch
};

// Backpropagation through ReLU hidden layers and the softmax output for one
// batch (features x samples).
Gradients loss_gradient(const std::vector<DenseLayer>& layers, const Eigen::MatrixXd& x,
                        std::span<const int> labels);

GestureModel train_classifier(const GestureDataset& data, const Hyperparameters& hyper,
                              std::uint64_t seed);

struct Prediction {
    GestureClass label = GestureClass::One;
    double confidence = 0.0;
    std::array<double, kGestureCount> probabilities{};
};

std::array<double, kGestureCount> softmax(const Eigen::VectorXd& logits);

// Argmax of the softmax; ties go to the lowest class index.
Prediction classify(const GestureModel& model, std::span<const double> features);

using ConfusionMatrix = std::array<std::array<std::size_t, kGestureCount>, kGestureCount>;

struct Evaluation {
    double accuracy = 0.0;
    ConfusionMatrix confusion{}; // rows: true class, columns: predicted
    std::size_t total = 0;
};

Evaluation evaluate(const GestureModel& model, const GestureDataset& data, Split split);

std::string write_model_json(const GestureModel& model);
GestureModel parse_model_json(const std::string& text);

} // namespace dronepaint::gesture
