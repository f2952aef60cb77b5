#include "dronepaint/gesture/classifier.hpp"

#include "dronepaint/error.hpp"
#include "dronepaint/util/digest.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

namespace dronepaint::gesture {

namespace {

constexpr int kModelVersion = 1;
constexpr const char* kModelFormat = "dronepaint-gesture-model";

struct Adam {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    long step = 0;
    std::vector<Eigen::MatrixXd> mw, vw;
    std::vector<Eigen::VectorXd> mb, vb;

    explicit Adam(const std::vector<DenseLayer>& layers) {
        for (const auto& l : layers) {
            mw.push_back(Eigen::MatrixXd::Zero(l.weights.rows(), l.weights.cols()));
            vw.push_back(Eigen::MatrixXd::Zero(l.weights.rows(), l.weights.cols()));
            mb.push_back(Eigen::VectorXd::Zero(l.bias.size()));
            vb.push_back(Eigen::VectorXd::Zero(l.bias.size()));
        }
    }

    void apply(std::vector<DenseLayer>& layers, const std::vector<Eigen::MatrixXd>& gw,
               const std::vector<Eigen::VectorXd>& gb, double lr) {
        ++step;
        const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
        const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
        for (std::size_t i = 0; i < layers.size(); ++i) {
            mw[i] = beta1 * mw[i] + (1.0 - beta1) * gw[i];
            vw[i] = beta2 * vw[i] + (1.0 - beta2) * gw[i].cwiseProduct(gw[i]);
            mb[i] = beta1 * mb[i] + (1.0 - beta1) * gb[i];
            vb[i] = beta2 * vb[i] + (1.0 - beta2) * gb[i].cwiseProduct(gb[i]);
            layers[i].weights.array() -=
                lr * (mw[i].array() / c1) / ((vw[i].array() / c2).sqrt() + eps);
            layers[i].bias.array() -=
                lr * (mb[i].array() / c1) / ((vb[i].array() / c2).sqrt() + eps);
        }
    }
};

// Column-wise softmax in place.
void softmax_columns(Eigen::MatrixXd& z) {
    for (Eigen::Index c = 0; c < z.cols(); ++c) {
        auto col = z.col(c);
        col.array() -= col.maxCoeff();
        col = col.array().exp().matrix();
        col /= col.sum();
    }
}

struct Forward {
    std::vector<Eigen::MatrixXd> activations; // activations[0] is the input
};

Forward forward(const std::vector<DenseLayer>& layers, const Eigen::MatrixXd& x) {
    Forward f;
    f.activations.push_back(x);
    for (std::size_t i = 0; i < layers.size(); ++i) {
        Eigen::MatrixXd z = layers[i].weights * f.activations.back();
        z.colwise() += layers[i].bias;
        if (i + 1 < layers.size()) {
            z = z.cwiseMax(0.0);
        } else {
            softmax_columns(z);
        }
        f.activations.push_back(std::move(z));
    }
    return f;
}

double cross_entropy(const Eigen::MatrixXd& probs, const std::vector<int>& labels,
                     std::span<const std::size_t> cols) {
    double loss = 0.0;
    for (std::size_t k = 0; k < cols.size(); ++k) {
        loss -= std::log(std::max(probs(labels[cols[k]], static_cast<Eigen::Index>(k)), 1e-300));
    }
    return loss;
}

Eigen::MatrixXd gather(const Eigen::MatrixXd& features, std::span<const std::size_t> cols) {
    Eigen::MatrixXd out(features.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) {
        out.col(static_cast<Eigen::Index>(k)) = features.col(static_cast<Eigen::Index>(cols[k]));
    }
    return out;
}

double mean_loss(const std::vector<DenseLayer>& layers, const Eigen::MatrixXd& features,
                 const std::vector<int>& labels) {
    if (features.cols() == 0) {
        return 0.0;
    }
    std::vector<std::size_t> all(static_cast<std::size_t>(features.cols()));
    std::iota(all.begin(), all.end(), std::size_t{0});
    const auto f = forward(layers, features);
    return cross_entropy(f.activations.back(), labels, all) / static_cast<double>(all.size());
}

void feature_matrix(const GestureDataset& data, Split split, Eigen::MatrixXd& x,
                    std::vector<int>& y) {
    const auto picked = data.select(split);
    x.resize(static_cast<Eigen::Index>(kFeatureCount), static_cast<Eigen::Index>(picked.size()));
    y.clear();
    for (std::size_t k = 0; k < picked.size(); ++k) {
        const auto fv = extract_features(picked[k]->frame);
        x.col(static_cast<Eigen::Index>(k)) = Eigen::Map<const Eigen::VectorXd>(fv.data(), fv.size());
        y.push_back(static_cast<int>(index_of(picked[k]->label)));
    }
}

} // namespace

Gradients loss_gradient(const std::vector<DenseLayer>& layers, const Eigen::MatrixXd& x,
                        std::span<const int> labels) {
    if (static_cast<std::size_t>(x.cols()) != labels.size() || labels.empty()) {
        fail(ErrorCode::ConfigError, "batch and label counts differ");
    }
    const auto n_layers = layers.size();
    const auto batch = labels.size();
    const double inv_b = 1.0 / static_cast<double>(batch);
    const auto f = forward(layers, x);

    Gradients g;
    g.weights.resize(n_layers);
    g.biases.resize(n_layers);
    for (std::size_t k = 0; k < batch; ++k) {
        g.loss -= std::log(std::max(f.activations.back()(labels[k], static_cast<Eigen::Index>(k)), 1e-300));
    }
    g.loss *= inv_b;

    // dL/dz for softmax + cross-entropy is (p - onehot) / B.
    Eigen::MatrixXd delta = f.activations.back();
    for (std::size_t k = 0; k < batch; ++k) {
        delta(labels[k], static_cast<Eigen::Index>(k)) -= 1.0;
    }
    delta *= inv_b;
    for (std::size_t i = n_layers; i-- > 0;) {
        g.weights[i] = delta * f.activations[i].transpose();
        g.biases[i] = delta.rowwise().sum();
        if (i > 0) {
            Eigen::MatrixXd back = layers[i].weights.transpose() * delta;
            delta = back.cwiseProduct((f.activations[i].array() > 0.0).cast<double>().matrix());
        }
    }
    return g;
}

std::size_t GestureModel::input_width() const {
    return layers.empty() ? 0 : static_cast<std::size_t>(layers.front().weights.cols());
}

std::size_t GestureModel::output_width() const {
    return layers.empty() ? 0 : static_cast<std::size_t>(layers.back().weights.rows());
}

Eigen::VectorXd GestureModel::logits(std::span<const double> features) const {
    if (layers.empty()) {
        fail(ErrorCode::ModelError, "model has no layers");
    }
    if (features.size() != input_width()) {
        fail(ErrorCode::ModelError, "feature width " + std::to_string(features.size()) +
                                        " does not match model input " +
                                        std::to_string(input_width()));
    }
    Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(features.data(),
                                                          static_cast<Eigen::Index>(features.size()));
    for (std::size_t i = 0; i < layers.size(); ++i) {
        Eigen::VectorXd z = layers[i].weights * a + layers[i].bias;
        a = i + 1 < layers.size() ? Eigen::VectorXd(z.cwiseMax(0.0)) : z;
    }
    return a;
}

std::string GestureModel::checksum() const {
    std::vector<double> flat;
    for (const auto& l : layers) {
        for (Eigen::Index r = 0; r < l.weights.rows(); ++r) {
            for (Eigen::Index c = 0; c < l.weights.cols(); ++c) {
                flat.push_back(l.weights(r, c));
            }
        }
        for (Eigen::Index r = 0; r < l.bias.size(); ++r) {
            flat.push_back(l.bias(r));
        }
    }
    return util::sha256_hex(
        std::span(reinterpret_cast<const std::uint8_t*>(flat.data()), flat.size() * sizeof(double)));
}

GestureModel train_classifier(const GestureDataset& data, const Hyperparameters& hyper,
                              std::uint64_t seed) {
    if (hyper.epochs < 0 || hyper.batch_size <= 0 || !(hyper.learning_rate > 0.0)) {
        fail(ErrorCode::ConfigError, "invalid training hyperparameters");
    }
    for (int h : hyper.hidden) {
        if (h <= 0) {
            fail(ErrorCode::ConfigError, "hidden layer widths must be positive");
        }
    }

    Eigen::MatrixXd train_x, test_x;
    std::vector<int> train_y, test_y;
    feature_matrix(data, Split::Train, train_x, train_y);
    feature_matrix(data, Split::Test, test_x, test_y);
    if (train_y.empty()) {
        fail(ErrorCode::ConfigError, "training split is empty");
    }

    GestureModel model;
    model.metadata.seed = seed;
    model.metadata.epochs = hyper.epochs;
    model.metadata.batch_size = hyper.batch_size;
    model.metadata.learning_rate = hyper.learning_rate;
    model.metadata.degenerate_training =
        std::set<int>(train_y.begin(), train_y.end()).size() < 2;

    std::mt19937_64 rng(seed);

    // He-normal initialisation, zero biases.
    std::vector<int> widths = {static_cast<int>(kFeatureCount)};
    widths.insert(widths.end(), hyper.hidden.begin(), hyper.hidden.end());
    widths.push_back(static_cast<int>(kGestureCount));
    for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
        std::normal_distribution<double> init(0.0, std::sqrt(2.0 / widths[i]));
        DenseLayer layer;
        layer.weights.resize(widths[i + 1], widths[i]);
        for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
            for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) {
                layer.weights(r, c) = init(rng);
            }
        }
        layer.bias = Eigen::VectorXd::Zero(widths[i + 1]);
        model.layers.push_back(std::move(layer));
    }

    Adam adam(model.layers);
    std::vector<std::size_t> order(train_y.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(hyper.batch_size)) {
            const auto end = std::min(order.size(), start + static_cast<std::size_t>(hyper.batch_size));
            const std::span<const std::size_t> batch(order.data() + start, end - start);

            const Eigen::MatrixXd bx = gather(train_x, batch);
            std::vector<int> by;
            by.reserve(batch.size());
            for (std::size_t k : batch) {
                by.push_back(train_y[k]);
            }
            const Gradients g = loss_gradient(model.layers, bx, by);
            epoch_loss += g.loss * static_cast<double>(batch.size());
            adam.apply(model.layers, g.weights, g.biases, hyper.learning_rate);
        }
        model.metadata.train_loss.push_back(epoch_loss / static_cast<double>(order.size()));
        if (!test_y.empty()) {
            model.metadata.test_loss.push_back(mean_loss(model.layers, test_x, test_y));
        }
    }
    return model;
}

std::array<double, kGestureCount> softmax(const Eigen::VectorXd& logits) {
    if (logits.size() != static_cast<Eigen::Index>(kGestureCount)) {
        fail(ErrorCode::ModelError, "expected 8 logits");
    }
    const double top = logits.maxCoeff();
    std::array<double, kGestureCount> p{};
    double sum = 0.0;
    for (std::size_t i = 0; i < kGestureCount; ++i) {
        p[i] = std::exp(logits(static_cast<Eigen::Index>(i)) - top);
        sum += p[i];
    }
    for (auto& v : p) {
        v /= sum;
    }
    return p;
}

Prediction classify(const GestureModel& model, std::span<const double> features) {
    if (model.output_width() != kGestureCount) {
        fail(ErrorCode::ModelError, "model output width must be 8");
    }
    Prediction pred;
    pred.probabilities = softmax(model.logits(features));
    const auto best = std::max_element(pred.probabilities.begin(), pred.probabilities.end());
    pred.label = static_cast<GestureClass>(best - pred.probabilities.begin());
    pred.confidence = *best;
    return pred;
}

Evaluation evaluate(const GestureModel& model, const GestureDataset& data, Split split) {
    const auto picked = data.select(split);
    if (picked.empty()) {
        fail(ErrorCode::ConfigError, "evaluation split is empty");
    }
    Evaluation ev;
    std::size_t correct = 0;
    for (const Sample* s : picked) {
        const auto fv = extract_features(s->frame);
        const auto pred = classify(model, fv);
        ++ev.confusion[index_of(s->label)][index_of(pred.label)];
        correct += pred.label == s->label ? 1 : 0;
    }
    ev.total = picked.size();
    ev.accuracy = static_cast<double>(correct) / static_cast<double>(ev.total);
    return ev;
}

std::string write_model_json(const GestureModel& model) {
    nlohmann::json doc;
    doc["format"] = kModelFormat;
    doc["version"] = kModelVersion;
    auto& layers = doc["layers"] = nlohmann::json::array();
    for (const auto& l : model.layers) {
        std::vector<double> w;
        w.reserve(static_cast<std::size_t>(l.weights.size()));
        for (Eigen::Index r = 0; r < l.weights.rows(); ++r) {
            for (Eigen::Index c = 0; c < l.weights.cols(); ++c) {
                w.push_back(l.weights(r, c));
            }
        }
        layers.push_back({{"inputs", l.weights.cols()},
                          {"outputs", l.weights.rows()},
                          {"weights", w},
                          {"bias", std::vector<double>(l.bias.data(), l.bias.data() + l.bias.size())}});
    }
    const auto& m = model.metadata;
    doc["metadata"] = {{"seed", m.seed},
                       {"epochs", m.epochs},
                       {"batch_size", m.batch_size},
                       {"learning_rate", m.learning_rate},
                       {"train_loss", m.train_loss},
                       {"test_loss", m.test_loss},
                       {"degenerate_training", m.degenerate_training}};
    return doc.dump() + "\n";
}

GestureModel parse_model_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ParseError, std::string("model: ") + e.what());
    }
    try {
        if (doc.value("format", "") != kModelFormat) {
            fail(ErrorCode::ModelError, "model: unrecognised format");
        }
        const int version = doc.at("version").get<int>();
        if (version != kModelVersion) {
            fail(ErrorCode::ModelError, "model: unsupported version " + std::to_string(version));
        }
        GestureModel model;
        for (const auto& jl : doc.at("layers")) {
            const auto in = jl.at("inputs").get<Eigen::Index>();
            const auto out = jl.at("outputs").get<Eigen::Index>();
            const auto w = jl.at("weights").get<std::vector<double>>();
            const auto b = jl.at("bias").get<std::vector<double>>();
            if (in <= 0 || out <= 0 || static_cast<Eigen::Index>(w.size()) != in * out ||
                static_cast<Eigen::Index>(b.size()) != out) {
                fail(ErrorCode::ModelError, "model: layer dimensions inconsistent");
            }
            if (!model.layers.empty() && model.layers.back().weights.rows() != in) {
                fail(ErrorCode::ModelError, "model: consecutive layer widths disagree");
            }
            DenseLayer layer;
            layer.weights = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                          Eigen::RowMajor>>(w.data(), out, in);
            layer.bias = Eigen::Map<const Eigen::VectorXd>(b.data(), out);
            if (!layer.weights.allFinite() || !layer.bias.allFinite()) {
                fail(ErrorCode::ModelError, "model: non-finite weights");
            }
            model.layers.push_back(std::move(layer));
        }
        if (model.layers.empty() || model.output_width() != kGestureCount) {
            fail(ErrorCode::ModelError, "model: output layer must have 8 units");
        }
        const auto& jm = doc.at("metadata");
        auto& m = model.metadata;
        m.seed = jm.value("seed", std::uint64_t{0});
        m.epochs = jm.value("epochs", 0);
        m.batch_size = jm.value("batch_size", 0);
        m.learning_rate = jm.value("learning_rate", 0.0);
        m.train_loss = jm.value("train_loss", std::vector<double>{});
        m.test_loss = jm.value("test_loss", std::vector<double>{});
        m.degenerate_training = jm.value("degenerate_training", false);
        return model;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ParseError, std::string("model: ") + e.what());
    }
}

} // namespace dronepaint::gesture
