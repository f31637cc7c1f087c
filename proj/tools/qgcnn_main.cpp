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
//
// Command-line front end: synthetic data generation, training, evaluation,
// dataset summaries, and adjacency export.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 unreadable or
// malformed data, 3 numeric failure (non-finite loss, unencodable input).

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qgcnn/checkpoint.hpp"
#include "qgcnn/data.hpp"
#include "qgcnn/graphconv.hpp"
#include "qgcnn/model.hpp"
#include "qgcnn/train.hpp"

namespace {

struct GenDataArgs {
    std::string class_a = "track";
    std::string class_b = "shower";
    int train_count = 160;
    int test_count = 40;
    double noise = 0.1;
    std::uint64_t seed = 0;
    std::string train_out;
    std::string test_out;
};

struct TrainArgs {
    std::string model = "qgcnn";
    std::string train_path;
    std::string test_path;
    int epochs = 30;
    int batch_size = 8;
    std::uint64_t seed = 0;
    int hops = qgcnn::kDefaultHops;
    int repeats = qgcnn::kDefaultRepeats;
    double sigma = qgcnn::kDefaultSigma;
    bool normalize_adjacency = false;
    double eta = 0.01;
    double alpha = 0.99;
    double epsilon = 1e-8;
    int threads = 0;
    bool serial = false;
    std::string metrics_out;
    std::string checkpoint_out;
};

struct EvalArgs {
    std::string model = "qgcnn";
    std::string checkpoint_path;
    std::string data_path;
    int hops = qgcnn::kDefaultHops;
    int repeats = qgcnn::kDefaultRepeats;
    double sigma = qgcnn::kDefaultSigma;
    bool normalize_adjacency = false;
    int threads = 0;
    bool serial = false;
};

struct AdjacencyArgs {
    int height = qgcnn::kImageSize;
    int width = qgcnn::kImageSize;
    double sigma = qgcnn::kDefaultSigma;
    bool self_loops = false;
    bool normalize = false;
    std::string out;
};

void print_split(const char* name, const qgcnn::Dataset& ds) {
    const auto stats = qgcnn::summarize(ds);
    std::printf("%s: %zu samples (%dx%d)\n", name, ds.images.size(), ds.height(),
                ds.width());
    for (int k = 0; k < 2; ++k) {
        std::printf("  class %d (%s): %d samples, mean intensity %.6g, max %.6g, "
                    "nonzero fraction %.4f\n",
                    k, ds.class_names[k].c_str(), stats[k].count, stats[k].mean_intensity,
                    stats[k].max_intensity, stats[k].nonzero_fraction);
    }
}

int cmd_gen_data(const GenDataArgs& args) {
    qgcnn::GeneratorConfig config;
    config.class_a = qgcnn::particle_kind_from_string(args.class_a);
    config.class_b = qgcnn::particle_kind_from_string(args.class_b);
    config.train_count = args.train_count;
    config.test_count = args.test_count;
    config.noise_level = args.noise;
    config.seed = args.seed;
    const auto [train, test] = qgcnn::generate(config);
    qgcnn::save_dataset(train, args.train_out);
    qgcnn::save_dataset(test, args.test_out);
    std::printf("wrote %s and %s\n", args.train_out.c_str(), args.test_out.c_str());
    print_split("train", train);
    print_split("test", test);
    return 0;
}

int cmd_train(const TrainArgs& args) {
    qgcnn::TrainOptions options;
    options.model = qgcnn::model_kind_from_string(args.model);
    options.epochs = args.epochs;
    options.batch_size = args.batch_size;
    options.seed = args.seed;
    options.hops = args.hops;
    options.repeats = args.repeats;
    options.sigma = args.sigma;
    options.normalize_adjacency = args.normalize_adjacency;
    options.rmsprop = {args.eta, args.alpha, args.epsilon};
    options.threads = args.serial ? 1 : args.threads;
    options.metrics_path = args.metrics_out;
    options.checkpoint_path = args.checkpoint_out;
    options.train_label = args.train_path;
    options.test_label = args.test_path;

    const qgcnn::Dataset train = qgcnn::load_dataset(args.train_path);
    const qgcnn::Dataset test = qgcnn::load_dataset(args.test_path);
    const qgcnn::TrainResult result = qgcnn::train_model(options, train, test, &std::cout);

    const auto& last = result.history.back();
    std::printf("final: train_loss=%.6g train_acc=%.4f test_loss=%.6g test_acc=%.4f\n",
                last.train_loss, last.train_accuracy, last.test_loss, last.test_accuracy);
    if (!args.metrics_out.empty()) std::printf("metrics: %s\n", args.metrics_out.c_str());
    if (!args.checkpoint_out.empty()) {
        std::printf("checkpoint: %s\n", args.checkpoint_out.c_str());
    }
    return 0;
}

int cmd_eval(const EvalArgs& args) {
    qgcnn::EvalOptions options;
    options.model = qgcnn::model_kind_from_string(args.model);
    options.hops = args.hops;
    options.repeats = args.repeats;
    options.sigma = args.sigma;
    options.normalize_adjacency = args.normalize_adjacency;
    options.threads = args.serial ? 1 : args.threads;

    const Eigen::VectorXd params = qgcnn::load_checkpoint(args.checkpoint_path);
    const qgcnn::Dataset data = qgcnn::load_dataset(args.data_path);
    const qgcnn::EvalResult result = qgcnn::evaluate(options, params, data);

    std::printf("samples: %d\n", result.count);
    std::printf("loss: %.17g\n", result.loss);
    std::printf("accuracy: %.17g\n", result.accuracy);
    std::printf("confusion (rows = true label, cols = prediction):\n");
    for (int r = 0; r < 2; ++r) {
        std::printf("  %6d %6d\n", result.confusion[r][0], result.confusion[r][1]);
    }
    return 0;
}

int cmd_summary(const std::string& data_path) {
    const qgcnn::Dataset data = qgcnn::load_dataset(data_path);
    print_split(data_path.c_str(), data);
    return 0;
}

int cmd_adjacency(const AdjacencyArgs& args) {
    qgcnn::Adjacency a =
        qgcnn::gaussian_pixel_adjacency(args.height, args.width, args.sigma);
    if (args.self_loops) a = qgcnn::add_self_loops(a);
    if (args.normalize) a = qgcnn::normalize_adjacency(a);
    std::ofstream os(args.out, std::ios::binary | std::ios::trunc);
    if (!os) {
        throw qgcnn::IoError("cannot open \"" + args.out + "\" for writing");
    }
    qgcnn::write_adjacency_csv(a, os);
    os.flush();
    if (!os) {
        throw qgcnn::IoError("write to \"" + args.out + "\" failed");
    }
    std::printf("wrote %ldx%ld adjacency to %s\n", static_cast<long>(a.rows()),
                static_cast<long>(a.cols()), args.out.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hybrid quantum-classical graph convolutional classifier"};
    app.require_subcommand(1);

    GenDataArgs gen_args;
    CLI::App* gen = app.add_subcommand("gen-data", "Generate a synthetic dataset pair");
    gen->add_option("--class-a", gen_args.class_a,
                    "Class 0 kind: track, shower, kink, heavy_track");
    gen->add_option("--class-b", gen_args.class_b, "Class 1 kind");
    gen->add_option("--train-count", gen_args.train_count, "Total train samples");
    gen->add_option("--test-count", gen_args.test_count, "Total test samples");
    gen->add_option("--noise", gen_args.noise, "Uniform noise level");
    gen->add_option("--seed", gen_args.seed, "Generator seed");
    gen->add_option("--train-out", gen_args.train_out, "Train dataset path")->required();
    gen->add_option("--test-out", gen_args.test_out, "Test dataset path")->required();

    TrainArgs train_args;
    CLI::App* train = app.add_subcommand("train", "Train a model");
    train->add_option("--model", train_args.model, "qgcnn or mlp");
    train->add_option("--train", train_args.train_path, "Train dataset")->required();
    train->add_option("--test", train_args.test_path, "Test dataset")->required();
    train->add_option("--epochs", train_args.epochs, "Training epochs");
    train->add_option("--batch-size", train_args.batch_size, "Mini-batch size");
    train->add_option("--seed", train_args.seed, "Init and shuffle seed");
    train->add_option("--hops", train_args.hops, "Graph aggregation rounds");
    train->add_option("--repeats", train_args.repeats, "Layers per quantum block");
    train->add_option("--sigma", train_args.sigma, "Gaussian adjacency length scale");
    train->add_flag("--normalize-adjacency", train_args.normalize_adjacency,
                    "Symmetrically normalize the adjacency");
    train->add_option("--eta", train_args.eta, "RMSProp learning rate");
    train->add_option("--alpha", train_args.alpha, "RMSProp smoothing");
    train->add_option("--epsilon", train_args.epsilon, "RMSProp stabilizer");
    train->add_option("--threads", train_args.threads, "Worker threads (0 = all cores)");
    train->add_flag("--serial", train_args.serial, "Force single-threaded execution");
    train->add_option("--metrics", train_args.metrics_out, "Per-epoch metrics CSV path");
    train->add_option("--checkpoint", train_args.checkpoint_out, "Final checkpoint path");

    EvalArgs eval_args;
    CLI::App* eval = app.add_subcommand("eval", "Evaluate a checkpoint on a dataset");
    eval->add_option("--model", eval_args.model, "qgcnn or mlp");
    eval->add_option("--checkpoint", eval_args.checkpoint_path, "Checkpoint path")
        ->required();
    eval->add_option("--data", eval_args.data_path, "Dataset path")->required();
    eval->add_option("--hops", eval_args.hops, "Graph aggregation rounds");
    eval->add_option("--repeats", eval_args.repeats, "Layers per quantum block");
    eval->add_option("--sigma", eval_args.sigma, "Gaussian adjacency length scale");
    eval->add_flag("--normalize-adjacency", eval_args.normalize_adjacency,
                   "Symmetrically normalize the adjacency");
    eval->add_option("--threads", eval_args.threads, "Worker threads (0 = all cores)");
    eval->add_flag("--serial", eval_args.serial, "Force single-threaded execution");

    std::string summary_path;
    CLI::App* summary = app.add_subcommand("summary", "Per-class statistics of a dataset");
    summary->add_option("--data", summary_path, "Dataset path")->required();

    AdjacencyArgs adj_args;
    CLI::App* adjacency =
        app.add_subcommand("adjacency", "Export a pixel-grid adjacency as CSV");
    adjacency->add_option("--height", adj_args.height, "Grid height");
    adjacency->add_option("--width", adj_args.width, "Grid width");
    adjacency->add_option("--sigma", adj_args.sigma, "Gaussian length scale");
    adjacency->add_flag("--self-loops", adj_args.self_loops, "Add self loops first");
    adjacency->add_flag("--normalize", adj_args.normalize, "Symmetrically normalize");
    adjacency->add_option("--out", adj_args.out, "Output CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (gen->parsed()) return cmd_gen_data(gen_args);
        if (train->parsed()) return cmd_train(train_args);
        if (eval->parsed()) return cmd_eval(eval_args);
        if (summary->parsed()) return cmd_summary(summary_path);
        if (adjacency->parsed()) return cmd_adjacency(adj_args);
    } catch (const qgcnn::FormatError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const qgcnn::IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const qgcnn::EncodingError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const qgcnn::NumericError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const qgcnn::Error& e) {
        // ConfigError, UsageError, and anything else contract-shaped.
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
