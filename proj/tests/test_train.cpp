// Copyright 2026 The qgcnn authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qgcnn/checkpoint.hpp"
#include "qgcnn/train.hpp"

using qgcnn::ConfigError;
using qgcnn::Dataset;
using qgcnn::GeneratorConfig;
using qgcnn::ModelKind;
using qgcnn::TrainOptions;
using qgcnn::UsageError;

namespace {

namespace fs = std::filesystem;

fs::path temp_file(const std::string& name) {
    return fs::temp_directory_path() / ("qgcnn_train_test_" + name);
}

std::string slurp(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    REQUIRE(is.good());
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

// Small, fast split pair shared by the tests.
std::pair<Dataset, Dataset> tiny_data() {
    GeneratorConfig cfg;
    cfg.train_count = 12;
    cfg.test_count = 6;
    cfg.seed = 3;
    return qgcnn::generate(cfg);
}

TrainOptions tiny_options() {
    TrainOptions opts;
    opts.epochs = 2;
    opts.batch_size = 4;
    opts.repeats = 1;
    opts.threads = 1;
    return opts;
}

}  // namespace

TEST_CASE("model kind names round-trip") {
    CHECK(qgcnn::model_kind_from_string("qgcnn") == ModelKind::qgcnn);
    CHECK(qgcnn::model_kind_from_string("mlp") == ModelKind::mlp);
    CHECK(std::string(qgcnn::to_string(ModelKind::qgcnn)) == "qgcnn");
    CHECK_THROWS_AS(qgcnn::model_kind_from_string("cnn"), ConfigError);
}

TEST_CASE("parallel_for covers every index exactly once") {
    for (int threads : {1, 3}) {
        std::vector<std::atomic<int>> hits(100);
        qgcnn::parallel_for(100, threads, [&](int i) { hits[i].fetch_add(1); });
        for (const auto& h : hits) CHECK(h.load() == 1);
    }
    // Zero work is fine.
    qgcnn::parallel_for(0, 2, [](int) { FAIL("must not be called"); });
}

TEST_CASE("parallel_for propagates exceptions") {
    CHECK_THROWS_AS(qgcnn::parallel_for(
                        8, 3,
                        [](int i) {
                            if (i == 5) throw UsageError("boom");
                        }),
                    UsageError);
}

TEST_CASE("training writes history, metrics, and a loadable checkpoint") {
    const auto [train, test] = tiny_data();
    TrainOptions opts = tiny_options();
    opts.metrics_path = temp_file("metrics.csv");
    opts.checkpoint_path = temp_file("model.qgcn");

    const qgcnn::TrainResult result = qgcnn::train_model(opts, train, test);
    REQUIRE(result.history.size() == 2);
    CHECK(result.history[0].epoch == 1);
    CHECK(result.history[1].epoch == 2);
    CHECK(result.params.size() == qgcnn::ModelParams::zero(1).count());
    CHECK(result.params.allFinite());
    for (const auto& row : result.history) {
        CHECK(std::isfinite(row.train_loss));
        CHECK(row.train_accuracy >= 0.0);
        CHECK(row.train_accuracy <= 1.0);
        CHECK(row.test_accuracy >= 0.0);
        CHECK(row.test_accuracy <= 1.0);
    }

    // CSV: config comment, header, one row per epoch.
    const std::string csv = slurp(opts.metrics_path);
    std::istringstream lines(csv);
    std::string comment, header, row1, row2, rest;
    REQUIRE(std::getline(lines, comment));
    REQUIRE(std::getline(lines, header));
    REQUIRE(std::getline(lines, row1));
    REQUIRE(std::getline(lines, row2));
    CHECK_FALSE(std::getline(lines, rest));
    CHECK(comment.rfind("# ", 0) == 0);
    CHECK(comment.find("model=qgcnn") != std::string::npos);
    CHECK(comment.find("seed=0") != std::string::npos);
    CHECK(header == "epoch,train_loss,train_acc,test_loss,test_acc");
    CHECK(row1.rfind("1,", 0) == 0);
    CHECK(row2.rfind("2,", 0) == 0);

    // Checkpoint holds exactly the final parameters.
    const Eigen::VectorXd restored = qgcnn::load_checkpoint(opts.checkpoint_path);
    CHECK(restored == result.params);

    fs::remove(opts.metrics_path);
    fs::remove(opts.checkpoint_path);
}

TEST_CASE("training is bitwise deterministic") {
    const auto [train, test] = tiny_data();
    TrainOptions opts = tiny_options();
    opts.metrics_path = temp_file("det_a.csv");
    const qgcnn::TrainResult a = qgcnn::train_model(opts, train, test);
    const std::string csv_a = slurp(opts.metrics_path);

    opts.metrics_path = temp_file("det_b.csv");
    const qgcnn::TrainResult b = qgcnn::train_model(opts, train, test);
    const std::string csv_b = slurp(opts.metrics_path);

    CHECK(a.params == b.params);
    CHECK(csv_a == csv_b);

    fs::remove(temp_file("det_a.csv"));
    fs::remove(temp_file("det_b.csv"));
}

TEST_CASE("parallel training reduces to the serial bits") {
    const auto [train, test] = tiny_data();
    TrainOptions serial = tiny_options();
    serial.metrics_path = temp_file("serial.csv");
    const qgcnn::TrainResult a = qgcnn::train_model(serial, train, test);
    const std::string csv_serial = slurp(serial.metrics_path);

    TrainOptions parallel = tiny_options();
    parallel.threads = 4;
    parallel.metrics_path = temp_file("parallel.csv");
    const qgcnn::TrainResult b = qgcnn::train_model(parallel, train, test);
    const std::string csv_parallel = slurp(parallel.metrics_path);

    CHECK(a.params == b.params);
    CHECK(csv_serial == csv_parallel);

    fs::remove(temp_file("serial.csv"));
    fs::remove(temp_file("parallel.csv"));
}

TEST_CASE("mlp training runs and reduces the loss on easy data") {
    GeneratorConfig cfg;
    cfg.train_count = 24;
    cfg.test_count = 8;
    cfg.seed = 11;
    const auto [train, test] = qgcnn::generate(cfg);

    TrainOptions opts;
    opts.model = ModelKind::mlp;
    opts.epochs = 4;
    opts.batch_size = 8;
    opts.threads = 1;
    const qgcnn::TrainResult result = qgcnn::train_model(opts, train, test);
    REQUIRE(result.history.size() == 4);
    CHECK(result.params.size() == qgcnn::MlpParams::zero().count());
    CHECK(result.history.back().train_loss < result.history.front().train_loss);
}

TEST_CASE("training logs progress when given a stream") {
    const auto [train, test] = tiny_data();
    TrainOptions opts = tiny_options();
    opts.epochs = 1;
    std::ostringstream log;
    qgcnn::train_model(opts, train, test, &log);
    CHECK(log.str().find("epoch 1") != std::string::npos);
}

TEST_CASE("train_model validates options and data") {
    const auto [train, test] = tiny_data();
    TrainOptions opts = tiny_options();

    TrainOptions bad_epochs = opts;
    bad_epochs.epochs = 0;
    CHECK_THROWS_AS(qgcnn::train_model(bad_epochs, train, test), ConfigError);

    TrainOptions bad_batch = opts;
    bad_batch.batch_size = 0;
    CHECK_THROWS_AS(qgcnn::train_model(bad_batch, train, test), ConfigError);

    TrainOptions bad_hops = opts;
    bad_hops.hops = -1;
    CHECK_THROWS_AS(qgcnn::train_model(bad_hops, train, test), ConfigError);

    Dataset empty;
    CHECK_THROWS_AS(qgcnn::train_model(opts, empty, test), UsageError);

    Dataset wrong_size;
    wrong_size.images.resize(2);
    for (auto& img : wrong_size.images) img.pixels = Eigen::MatrixXd::Ones(16, 16);
    CHECK_THROWS_AS(qgcnn::train_model(opts, wrong_size, test), qgcnn::FormatError);
}

TEST_CASE("divergent training aborts with a parameter dump") {
    // An absurd learning rate blows the MLP activations up to inf within two
    // epochs; the shifted softmax then yields NaN and training must abort,
    // leaving the pre-abort parameters next to the checkpoint path.
    GeneratorConfig cfg;
    cfg.train_count = 8;
    cfg.test_count = 2;
    const auto [train, test] = qgcnn::generate(cfg);

    TrainOptions opts;
    opts.model = ModelKind::mlp;
    opts.epochs = 3;
    opts.batch_size = 4;
    opts.threads = 1;
    opts.rmsprop.eta = 1e155;
    opts.checkpoint_path = temp_file("diverge.qgcn");

    CHECK_THROWS_AS(qgcnn::train_model(opts, train, test), qgcnn::NumericError);
    const fs::path dump = temp_file("diverge.qgcn.aborted");
    CHECK(fs::exists(dump));
    const Eigen::VectorXd params = qgcnn::load_checkpoint(dump);
    CHECK(params.size() == qgcnn::MlpParams::zero().count());
    fs::remove(dump);
}

TEST_CASE("evaluate reports loss, accuracy, and confusion counts") {
    const auto [train, test] = tiny_data();
    TrainOptions opts = tiny_options();
    opts.epochs = 1;
    const qgcnn::TrainResult result = qgcnn::train_model(opts, train, test);

    qgcnn::EvalOptions eopts;
    eopts.repeats = 1;
    eopts.threads = 1;
    const qgcnn::EvalResult eval = qgcnn::evaluate(eopts, result.params, test);
    CHECK(eval.count == 6);
    CHECK(std::isfinite(eval.loss));
    const int total = eval.confusion[0][0] + eval.confusion[0][1] +
                      eval.confusion[1][0] + eval.confusion[1][1];
    CHECK(total == 6);
    const int correct = eval.confusion[0][0] + eval.confusion[1][1];
    CHECK(eval.accuracy ==
          doctest::Approx(static_cast<double>(correct) / 6).epsilon(1e-15));

    // The training history's final test metrics come from the same pipeline.
    CHECK(eval.accuracy == result.history.back().test_accuracy);
    CHECK(eval.loss == result.history.back().test_loss);
}

TEST_CASE("zero parameters predict class 0 everywhere") {
    // All-zero parameters give identical logits; the tie breaks to class 0,
    // so accuracy equals the class-0 fraction.
    Dataset ds;
    ds.images.resize(4);
    for (int i = 0; i < 4; ++i) {
        ds.images[i].pixels = Eigen::MatrixXd::Constant(32, 32, 1.0);
        ds.images[i].pixels(0, i) = 2.0;  // break image symmetry, keep labels
        ds.images[i].label = i == 3;      // three zeros, one one
    }
    qgcnn::EvalOptions opts;
    opts.threads = 1;
    const Eigen::VectorXd zeros =
        Eigen::VectorXd::Zero(qgcnn::ModelParams::zero().count());
    const qgcnn::EvalResult eval = qgcnn::evaluate(opts, zeros, ds);
    CHECK(eval.accuracy == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(eval.confusion[0][0] == 3);
    CHECK(eval.confusion[1][0] == 1);
    CHECK(eval.confusion[0][1] == 0);
    CHECK(eval.confusion[1][1] == 0);
}

TEST_CASE("evaluate validates the parameter count") {
    const auto [train, test] = tiny_data();
    (void)train;
    qgcnn::EvalOptions opts;
    opts.threads = 1;
    const Eigen::VectorXd wrong = Eigen::VectorXd::Zero(10);
    CHECK_THROWS_AS(qgcnn::evaluate(opts, wrong, test), ConfigError);
}
