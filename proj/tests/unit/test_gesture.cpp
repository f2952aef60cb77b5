#include "dronepaint/error.hpp"
#include "dronepaint/gesture/classifier.hpp"
#include "dronepaint/gesture/dataset.hpp"
#include "dronepaint/gesture/features.hpp"
#include "dronepaint/gesture/hand.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace dp = dronepaint;
namespace g = dronepaint::gesture;

namespace {

template <typename F>
dp::ErrorCode code_of(F&& f) {
    try {
        f();
    } catch (const dp::Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected a dronepaint::Error";
    return dp::ErrorCode::IoError;
}

g::HandFrame frame_with(std::size_t idx, double x, double y) {
    g::HandFrame f;
    for (auto& lm : f.landmarks) {
        lm = {0.3, 0.3, 0.0};
    }
    f.landmarks[idx] = {x, y, 0.0};
    return f;
}

g::HandFrame transform(const g::HandFrame& f, double scale, const dp::Vec3& pivot, const dp::Vec3& shift) {
    g::HandFrame out = f;
    for (auto& lm : out.landmarks) {
        const dp::Vec3 p = pivot + scale * (lm.vec() - pivot) + shift;
        lm = {p.x(), p.y(), p.z()};
    }
    return out;
}

// Independent route: acos of the normalized dot product.
double acos_angle(const dp::Vec3& a, const dp::Vec3& b, const dp::Vec3& c) {
    const dp::Vec3 u = (a - b).normalized();
    const dp::Vec3 v = (c - b).normalized();
    return std::acos(std::clamp(u.dot(v), -1.0, 1.0));
}

g::GestureDataset small_dataset(std::size_t per_class, std::uint64_t seed) {
    auto spec = g::DatasetSpec::defaults();
    for (auto& c : spec.classes) {
        c.count = per_class;
    }
    return g::synth_dataset(spec, seed);
}

g::GestureModel constant_model(const std::array<double, g::kGestureCount>& bias) {
    g::GestureModel m;
    g::DenseLayer l;
    l.weights = Eigen::MatrixXd::Zero(g::kGestureCount, g::kFeatureCount);
    l.bias = Eigen::Map<const Eigen::VectorXd>(bias.data(), bias.size());
    m.layers.push_back(l);
    return m;
}

const g::GestureModel& default_model() {
    static const g::GestureModel model =
        g::train_classifier(g::synth_dataset(g::DatasetSpec::defaults(), 42), g::Hyperparameters{}, 42);
    return model;
}

} // namespace

TEST(PalmSize, VerticalPalmOnVgaImage) {
    auto f = frame_with(9, 0.5, 0.25);
    f.landmarks[0] = {0.5, 0.5, 0.0};
    EXPECT_DOUBLE_EQ(g::palm_size(f, 640, 480), 120.0);
}

TEST(PalmSize, CoincidentLandmarksAreDegenerate) {
    g::HandFrame f;
    for (auto& lm : f.landmarks) {
        lm = {0.4, 0.4, 0.1};
    }
    EXPECT_EQ(code_of([&] { g::palm_size(f, 640, 480); }), dp::ErrorCode::DegenerateHand);
}

TEST(PalmSize, CanonicalPoseMatchesDirectDistance) {
    for (auto cls : g::kAllGestures) {
        const auto f = g::canonical_pose(cls);
        const double dx = (f.landmarks[9].x - f.landmarks[0].x) * 640.0;
        const double dy = (f.landmarks[9].y - f.landmarks[0].y) * 480.0;
        EXPECT_NEAR(g::palm_size(f, 640, 480), std::sqrt(dx * dx + dy * dy), 1e-12);
    }
}

TEST(HandPosition, IndexTipDenormalized) {
    EXPECT_EQ(g::hand_position(frame_with(8, 0.5, 0.5), 640, 480), (g::PixelPoint{320.0, 240.0}));
    EXPECT_EQ(g::hand_position(frame_with(8, 0.0, 0.0), 640, 480), (g::PixelPoint{0.0, 0.0}));
    const auto f = g::canonical_pose(g::GestureClass::One);
    const auto p = g::hand_position(f, 1280, 720);
    EXPECT_DOUBLE_EQ(p.x, f.landmarks[8].x * 1280);
    EXPECT_DOUBLE_EQ(p.y, f.landmarks[8].y * 720);
}

TEST(Depth, PinholeModel) {
    const g::DepthCalibration cal{60.0};
    EXPECT_DOUBLE_EQ(g::estimate_depth(120.0, cal), 0.5);
    EXPECT_DOUBLE_EQ(g::estimate_depth(240.0, cal), 0.5 * g::estimate_depth(120.0, cal));
    const auto fitted = g::DepthCalibration::from_observation(1.0, 60.0);
    EXPECT_DOUBLE_EQ(g::estimate_depth(60.0, fitted), 1.0);
    EXPECT_EQ(code_of([&] { g::estimate_depth(0.0, cal); }), dp::ErrorCode::DegenerateHand);
    EXPECT_EQ(code_of([&] { g::estimate_depth(-3.0, cal); }), dp::ErrorCode::DegenerateHand);
}

TEST(HandFrame, RejectsWrongLandmarkCount) {
    std::vector<g::Landmark> lms(20);
    try {
        g::make_frame(lms, 0.0);
        FAIL();
    } catch (const dp::Error& e) {
        EXPECT_EQ(e.code(), dp::ErrorCode::InvalidFrame);
        EXPECT_NE(std::string(e.what()).find("expected 21"), std::string::npos);
    }
    lms.resize(22);
    EXPECT_EQ(code_of([&] { g::make_frame(lms, 0.0); }), dp::ErrorCode::InvalidFrame);
}

TEST(HandFrame, RejectsNonFinite) {
    std::vector<g::Landmark> lms(21, g::Landmark{0.5, 0.5, 0.0});
    lms[3].y = std::nan("");
    EXPECT_EQ(code_of([&] { g::make_frame(lms, 0.0); }), dp::ErrorCode::InvalidFrame);
    auto f = g::canonical_pose(g::GestureClass::Five);
    f.landmarks[4].x = INFINITY;
    EXPECT_EQ(code_of([&] { g::extract_features(f); }), dp::ErrorCode::InvalidFrame);
}

TEST(GestureClass, NamesRoundTrip) {
    const char* names[] = {"ONE", "TWO", "THREE", "FOUR", "FIVE", "OKAY", "ROCK", "THUMBS_UP"};
    for (std::size_t i = 0; i < g::kGestureCount; ++i) {
        EXPECT_EQ(g::to_string(g::kAllGestures[i]), names[i]);
        EXPECT_EQ(g::gesture_from_string(names[i]), g::kAllGestures[i]);
    }
    EXPECT_FALSE(g::gesture_from_string("SIX").has_value());
}

TEST(Features, LayoutMatchesBruteForce) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const auto f = dp::testing::random_hand(rng);
        const auto fv = g::extract_features(f);
        ASSERT_EQ(fv.size(), 225u);
        std::size_t k = 0;
        for (const auto& chain : g::kFingerChains) {
            for (std::size_t j = 1; j <= 3; ++j) {
                const double expected =
                    acos_angle(f.landmarks[chain[j - 1]].vec(), f.landmarks[chain[j]].vec(), f.landmarks[chain[j + 1]].vec());
                EXPECT_NEAR(fv[k], expected, 1e-7) << "angle " << k;
                ++k;
            }
        }
        const double palm = (f.landmarks[9].vec() - f.landmarks[0].vec()).norm();
        for (std::size_t i = 0; i < 21; ++i) {
            for (std::size_t j = i + 1; j < 21; ++j) {
                const double d = std::sqrt(std::pow(f.landmarks[i].x - f.landmarks[j].x, 2) +
                                           std::pow(f.landmarks[i].y - f.landmarks[j].y, 2) +
                                           std::pow(f.landmarks[i].z - f.landmarks[j].z, 2));
                EXPECT_NEAR(fv[k], d / palm, 1e-12) << "pair " << i << "," << j;
                ++k;
            }
        }
        EXPECT_EQ(k, 225u);
    }
}

TEST(Features, RangesHold) {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 50; ++trial) {
        const auto fv = g::extract_features(dp::testing::random_hand(rng));
        for (std::size_t i = 0; i < 15; ++i) {
            EXPECT_GE(fv[i], 0.0);
            EXPECT_LE(fv[i], std::numbers::pi);
        }
        for (std::size_t i = 15; i < 225; ++i) {
            EXPECT_GE(fv[i], 0.0);
        }
    }
}

TEST(Features, InvariantToTranslationAndScale) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        const auto f = dp::testing::random_hand(rng);
        const auto base = g::extract_features(f);
        const dp::Vec3 pivot(0.3 * trial, -0.7, 0.2);
        for (const auto& t : {transform(f, 2.0, pivot, dp::Vec3::Zero()), transform(f, 1.0, pivot, dp::Vec3(0.37, -1.2, 0.05)),
                              transform(f, 0.3, dp::Vec3(5, 5, 5), dp::Vec3(-2, 1, 0))}) {
            const auto other = g::extract_features(t);
            for (std::size_t i = 0; i < base.size(); ++i) {
                EXPECT_NEAR(other[i], base[i], 1e-9) << "feature " << i;
            }
        }
    }
}

TEST(Features, StraightFingerAnglesArePi) {
    auto f = g::canonical_pose(g::GestureClass::Five);
    const dp::Vec3 wrist = f.landmarks[0].vec();
    const dp::Vec3 dir(0.05, -0.3, 0.02);
    for (std::size_t j = 1; j <= 4; ++j) {
        const dp::Vec3 p = wrist + dir * (0.25 * static_cast<double>(j) + 0.1);
        f.landmarks[4 + j] = {p.x(), p.y(), p.z()};
    }
    const auto fv = g::extract_features(f);
    for (std::size_t k = 3; k < 6; ++k) {
        EXPECT_NEAR(fv[k], std::numbers::pi, 1e-12);
    }
}

TEST(Features, DegeneratePalm) {
    auto f = g::canonical_pose(g::GestureClass::Five);
    f.landmarks[9] = f.landmarks[0];
    EXPECT_EQ(code_of([&] { g::extract_features(f); }), dp::ErrorCode::DegenerateHand);
}

TEST(Features, FlatLandmarksAccepted) {
    auto f = g::canonical_pose(g::GestureClass::Three);
    for (auto& lm : f.landmarks) {
        lm.z = 0.0;
    }
    const auto fv = g::extract_features(f);
    EXPECT_TRUE(std::all_of(fv.begin(), fv.end(), [](double v) { return std::isfinite(v); }));
}

TEST(Features, JointAngleKnownValues) {
    EXPECT_NEAR(g::joint_angle({1, 0, 0}, {0, 0, 0}, {0, 1, 0}), std::numbers::pi / 2, 1e-15);
    EXPECT_NEAR(g::joint_angle({1, 0, 0}, {0, 0, 0}, {-1, 0, 0}), std::numbers::pi, 1e-15);
    EXPECT_NEAR(g::joint_angle({1, 0, 0}, {0, 0, 0}, {2, 0, 0}), 0.0, 1e-15);
    EXPECT_NEAR(g::joint_angle({1, 0, 0}, {0, 0, 0}, {1, 1, 0}), std::numbers::pi / 4, 1e-15);
}

TEST(Dataset, DefaultSpecShape) {
    const auto data = g::synth_dataset(g::DatasetSpec::defaults(), 42);
    EXPECT_EQ(data.samples.size(), 8000u);
    std::array<std::size_t, 8> per_class{}, train{};
    for (const auto& s : data.samples) {
        ++per_class[g::index_of(s.label)];
        train[g::index_of(s.label)] += s.split == g::Split::Train;
    }
    for (std::size_t c = 0; c < 8; ++c) {
        EXPECT_EQ(per_class[c], 1000u);
        EXPECT_EQ(train[c], 800u);
    }
    EXPECT_EQ(data.count(g::Split::Train), 6400u);
    EXPECT_EQ(data.count(g::Split::Test), 1600u);
    EXPECT_EQ(data.select(g::Split::Train).size() + data.select(g::Split::Test).size(), data.samples.size());
}

TEST(Dataset, ZeroSigmaReproducesCanonicalPose) {
    auto spec = g::DatasetSpec::defaults();
    spec.sigma = 0.0;
    for (auto& c : spec.classes) {
        c.count = 5;
    }
    const auto data = g::synth_dataset(spec, 1);
    for (const auto& s : data.samples) {
        EXPECT_EQ(s.frame.landmarks, g::canonical_pose(s.label).landmarks);
    }
}

TEST(Dataset, DeterministicForSeed) {
    const auto a = g::write_dataset_csv(small_dataset(20, 9));
    const auto b = g::write_dataset_csv(small_dataset(20, 9));
    const auto c = g::write_dataset_csv(small_dataset(20, 10));
    EXPECT_EQ(a, b);
    EXPECT_NE(a, c);
}

TEST(Dataset, UnknownClassRejected) {
    auto spec = g::DatasetSpec::defaults();
    spec.classes.push_back({"SIX", 10, std::nullopt});
    EXPECT_EQ(code_of([&] { g::synth_dataset(spec, 1); }), dp::ErrorCode::ConfigError);
}

TEST(Dataset, CsvRoundTrip) {
    const auto data = small_dataset(7, 3);
    const auto text = g::write_dataset_csv(data);
    EXPECT_EQ(text.substr(0, 20), "label,split,x0,y0,z0");
    const auto back = g::parse_dataset_csv(text);
    EXPECT_EQ(back.samples, data.samples);
}

TEST(Dataset, FeatureVectorsIndependentOfSampleOrder) {
    auto data = small_dataset(10, 4);
    std::vector<g::FeatureVector> before;
    for (const auto& s : data.samples) {
        before.push_back(g::extract_features(s.frame));
    }
    std::vector<std::size_t> perm(data.samples.size());
    std::iota(perm.begin(), perm.end(), 0u);
    std::shuffle(perm.begin(), perm.end(), std::mt19937_64(11));
    for (std::size_t k : perm) {
        EXPECT_EQ(g::extract_features(data.samples[k].frame), before[k]);
    }
}

TEST(Classifier, GradientMatchesFiniteDifferences) {
    const auto data = small_dataset(3, 2);
    g::Hyperparameters hyper;
    hyper.hidden = {6, 5};
    hyper.epochs = 2;
    const auto model = g::train_classifier(data, hyper, 3);

    Eigen::MatrixXd x(g::kFeatureCount, 6);
    std::vector<int> labels;
    for (int k = 0; k < 6; ++k) {
        const auto& s = data.samples[static_cast<std::size_t>(k) * 4];
        const auto fv = g::extract_features(s.frame);
        x.col(k) = Eigen::Map<const Eigen::VectorXd>(fv.data(), fv.size());
        labels.push_back(static_cast<int>(g::index_of(s.label)));
    }
    const auto grad = g::loss_gradient(model.layers, x, labels);
    const double h = 1e-6;
    std::mt19937_64 rng(1);
    for (std::size_t li = 0; li < model.layers.size(); ++li) {
        const auto& w = model.layers[li].weights;
        for (int probe = 0; probe < 10; ++probe) {
            const auto r = std::uniform_int_distribution<Eigen::Index>(0, w.rows() - 1)(rng);
            const auto c = std::uniform_int_distribution<Eigen::Index>(0, w.cols() - 1)(rng);
            auto plus = model.layers, minus = model.layers;
            plus[li].weights(r, c) += h;
            minus[li].weights(r, c) -= h;
            const double fd =
                (g::loss_gradient(plus, x, labels).loss - g::loss_gradient(minus, x, labels).loss) / (2 * h);
            EXPECT_NEAR(grad.weights[li](r, c), fd, 1e-6) << "layer " << li;
        }
        for (Eigen::Index r = 0; r < model.layers[li].bias.size(); ++r) {
            auto plus = model.layers, minus = model.layers;
            plus[li].bias(r) += h;
            minus[li].bias(r) -= h;
            const double fd =
                (g::loss_gradient(plus, x, labels).loss - g::loss_gradient(minus, x, labels).loss) / (2 * h);
            EXPECT_NEAR(grad.biases[li](r), fd, 1e-6) << "bias layer " << li;
        }
    }
}

TEST(Classifier, SameSeedSameWeights) {
    const auto data = small_dataset(30, 5);
    g::Hyperparameters hyper;
    hyper.epochs = 3;
    const auto a = g::train_classifier(data, hyper, 17);
    const auto b = g::train_classifier(data, hyper, 17);
    const auto c = g::train_classifier(data, hyper, 18);
    EXPECT_EQ(a.checksum(), b.checksum());
    EXPECT_EQ(a.metadata.train_loss, b.metadata.train_loss);
    EXPECT_EQ(a.metadata.test_loss, b.metadata.test_loss);
    EXPECT_NE(a.checksum(), c.checksum());
    EXPECT_EQ(a.metadata.train_loss.size(), 3u);
    EXPECT_EQ(a.output_width(), 8u);
    EXPECT_EQ(a.input_width(), 225u);
}

TEST(Classifier, SingleClassIsFlaggedAndFitsItsClass) {
    g::DatasetSpec spec = g::DatasetSpec::defaults();
    spec.classes = {{"ROCK", 40, std::nullopt}};
    const auto data = g::synth_dataset(spec, 2);
    g::Hyperparameters hyper;
    hyper.epochs = 5;
    const auto model = g::train_classifier(data, hyper, 2);
    EXPECT_TRUE(model.metadata.degenerate_training);
    EXPECT_DOUBLE_EQ(g::evaluate(model, data, g::Split::Test).accuracy, 1.0);
}

TEST(Classifier, SoftmaxSumsToOne) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n(0.0, 5.0);
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::VectorXd logits(8);
        for (int i = 0; i < 8; ++i) {
            logits(i) = n(rng);
        }
        const auto p = g::softmax(logits);
        EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-6);
        const auto shifted = g::softmax(logits.array() + 123.0);
        for (int i = 0; i < 8; ++i) {
            EXPECT_NEAR(shifted[i], p[i], 1e-12);
        }
    }
}

TEST(Classifier, UniformLogitsGiveEighthAndLowestIndex) {
    const auto model = constant_model({});
    const auto pred = g::classify(model, g::extract_features(g::canonical_pose(g::GestureClass::Rock)));
    EXPECT_NEAR(pred.confidence, 1.0 / 8.0, 1e-15);
    EXPECT_EQ(pred.label, g::GestureClass::One);
}

TEST(Classifier, ArgmaxInvariantToLogitShift) {
    std::array<double, 8> bias{0.1, -0.3, 0.7, 0.2, 0.69, -2.0, 0.0, 0.3};
    auto shifted = bias;
    for (double& b : shifted) {
        b += 40.0;
    }
    const auto fv = g::extract_features(g::canonical_pose(g::GestureClass::Two));
    const auto a = g::classify(constant_model(bias), fv);
    const auto b = g::classify(constant_model(shifted), fv);
    EXPECT_EQ(a.label, g::GestureClass::Three);
    EXPECT_EQ(a.label, b.label);
    EXPECT_NEAR(a.confidence, b.confidence, 1e-12);
}

TEST(Classifier, WidthMismatchIsModelError) {
    const auto model = constant_model({});
    std::vector<double> short_features(100, 0.0);
    EXPECT_EQ(code_of([&] { g::classify(model, short_features); }), dp::ErrorCode::ModelError);
}

TEST(Evaluate, AlwaysOneModelOnBalancedSet) {
    const auto data = small_dataset(10, 8);
    const auto ev = g::evaluate(constant_model({5.0}), data, g::Split::Test);
    EXPECT_DOUBLE_EQ(ev.accuracy, 1.0 / 8.0);
    for (std::size_t r = 0; r < 8; ++r) {
        EXPECT_EQ(ev.confusion[r][0], 2u);
        EXPECT_EQ(std::accumulate(ev.confusion[r].begin(), ev.confusion[r].end(), std::size_t{0}), 2u);
    }
}

TEST(Evaluate, EmptySplitIsConfigError) {
    g::DatasetSpec spec = g::DatasetSpec::defaults();
    spec.train_fraction = 1.0;
    for (auto& c : spec.classes) {
        c.count = 3;
    }
    const auto data = g::synth_dataset(spec, 1);
    EXPECT_EQ(code_of([&] { g::evaluate(constant_model({}), data, g::Split::Test); }), dp::ErrorCode::ConfigError);
}

TEST(ModelFile, RoundTripAndVersionCheck) {
    const auto data = small_dataset(10, 5);
    g::Hyperparameters hyper;
    hyper.epochs = 2;
    const auto model = g::train_classifier(data, hyper, 4);
    const auto text = g::write_model_json(model);
    const auto back = g::parse_model_json(text);
    EXPECT_EQ(back.checksum(), model.checksum());
    EXPECT_EQ(back.metadata.train_loss, model.metadata.train_loss);
    EXPECT_EQ(back.metadata.seed, 4u);

    auto doc = nlohmann::json::parse(text);
    doc["version"] = 99;
    EXPECT_EQ(code_of([&] { g::parse_model_json(doc.dump()); }), dp::ErrorCode::ModelError);
}

TEST(TrainedModel, HeldOutAccuracyAndCanonicalPoses) {
    const auto& model = default_model();
    const auto data = g::synth_dataset(g::DatasetSpec::defaults(), 42);
    const auto ev = g::evaluate(model, data, g::Split::Test);
    EXPECT_GE(ev.accuracy, 0.99);
    for (std::size_t r = 0; r < 8; ++r) {
        EXPECT_EQ(std::accumulate(ev.confusion[r].begin(), ev.confusion[r].end(), std::size_t{0}), 200u);
    }
    for (auto cls : g::kAllGestures) {
        EXPECT_EQ(g::classify(model, g::extract_features(g::canonical_pose(cls))).label, cls);
    }
    auto spec = g::DatasetSpec::defaults();
    spec.sigma = 0.0;
    for (auto& c : spec.classes) {
        c.count = 4;
    }
    const auto perfect = g::evaluate(model, g::synth_dataset(spec, 0), g::Split::Train);
    EXPECT_DOUBLE_EQ(perfect.accuracy, 1.0);
    for (std::size_t r = 0; r < 8; ++r) {
        for (std::size_t c = 0; c < 8; ++c) {
            EXPECT_EQ(perfect.confusion[r][c], r == c ? 3u : 0u);
        }
    }
}
