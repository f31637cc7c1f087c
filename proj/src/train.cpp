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

#include "qgcnn/train.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <numeric>
#include <thread>

#include "qgcnn/autodiff.hpp"
#include "qgcnn/checkpoint.hpp"
#include "qgcnn/rng.hpp"

namespace qgcnn {

namespace {

// Substream id for epoch shuffling; 2 and 4 belong to parameter init.
constexpr std::uint64_t kShuffleStream = 3;

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void check_dataset(const Dataset& ds, const char* name) {
    if (ds.images.empty()) {
        throw UsageError(std::string(name) + " dataset is empty");
    }
    for (const auto& image : ds.images) {
        if (image.pixels.rows() != kImageSize || image.pixels.cols() != kImageSize) {
            throw FormatError(std::string(name) + " dataset has " +
                              std::to_string(image.pixels.rows()) + "x" +
                              std::to_string(image.pixels.cols()) +
                              " images, the model needs " + std::to_string(kImageSize) +
                              "x" + std::to_string(kImageSize));
        }
    }
}

/// Pipeline state shared by training and evaluation: for the hybrid model the
/// per-image encoded states (parameter-independent, computed once), for the
/// MLP nothing beyond the images themselves.
struct Pipeline {
    ModelKind model;
    int hops = 0;
    int repeats = 0;
    std::vector<StateVector> encoded; // qgcnn only, one per image
    const Dataset* data = nullptr;

    static Pipeline build(ModelKind model, int hops, int repeats, const Dataset& ds,
                          const Adjacency* adjacency) {
        Pipeline p;
        p.model = model;
        p.hops = hops;
        p.repeats = repeats;
        p.data = &ds;
        if (model == ModelKind::qgcnn) {
            p.encoded.reserve(ds.images.size());
            for (const auto& image : ds.images) {
                p.encoded.push_back(encode_image(image, *adjacency, hops));
            }
        }
        return p;
    }

    int size() const { return static_cast<int>(data->images.size()); }
    int label(int i) const { return data->images[i].label; }
};

/// Loss/accuracy/confusion over a pipeline. Per-sample losses are computed in
/// parallel into slots and reduced in index order.
EvalResult eval_pipeline(const Pipeline& p, const Eigen::VectorXd& flat, int threads) {
    const int n = p.size();
    std::vector<double> losses(n);
    std::vector<int> predictions(n);
    if (p.model == ModelKind::qgcnn) {
        const ModelParams params = unflatten_qgcnn(flat, p.repeats);
        parallel_for(n, threads, [&](int i) {
            const Eigen::VectorXd logits = qgcnn_trace(params, p.encoded[i]).logits;
            losses[i] = softmax_cross_entropy(logits, p.label(i)).loss;
            predictions[i] = predict(logits);
        });
    } else {
        const MlpParams params = unflatten_mlp(flat);
        parallel_for(n, threads, [&](int i) {
            const Eigen::VectorXd logits = mlp_forward(params, p.data->images[i]);
            losses[i] = softmax_cross_entropy(logits, p.label(i)).loss;
            predictions[i] = predict(logits);
        });
    }
    EvalResult out;
    out.count = n;
    int correct = 0;
    for (int i = 0; i < n; ++i) {
        out.loss += losses[i];
        out.confusion[p.label(i)][predictions[i]] += 1;
        correct += predictions[i] == p.label(i) ? 1 : 0;
    }
    out.loss /= n;
    out.accuracy = static_cast<double>(correct) / n;
    return out;
}

} // namespace

const char* to_string(ModelKind kind) {
    return kind == ModelKind::qgcnn ? "qgcnn" : "mlp";
}

ModelKind model_kind_from_string(const std::string& name) {
    if (name == "qgcnn") return ModelKind::qgcnn;
    if (name == "mlp") return ModelKind::mlp;
    throw ConfigError("unknown model \"" + name + "\" (expected qgcnn or mlp)");
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
    if (count <= 0) return;
    int workers = threads <= 0 ? static_cast<int>(std::thread::hardware_concurrency())
                               : threads;
    if (workers < 1) workers = 1;
    if (workers > count) workers = count;
    if (workers == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    auto work = [&] {
        try {
            while (true) {
                const int i = next.fetch_add(1);
                if (i >= count) break;
                fn(i);
            }
        } catch (...) {
            const std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (int t = 1; t < workers; ++t) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

TrainResult train_model(const TrainOptions& options, const Dataset& train,
                        const Dataset& test, std::ostream* log) {
    if (options.epochs < 1) throw ConfigError("epochs must be >= 1");
    if (options.batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (options.hops < 0) throw ConfigError("hops must be >= 0");
    if (options.repeats < 1) throw ConfigError("repeats must be >= 1");
    if (options.threads < 0) throw ConfigError("threads must be >= 0");
    check_dataset(train, "train");
    check_dataset(test, "test");

    Adjacency adjacency;
    if (options.model == ModelKind::qgcnn) {
        adjacency = gaussian_pixel_adjacency(kImageSize, kImageSize, options.sigma);
        if (options.normalize_adjacency) adjacency = normalize_adjacency(adjacency);
    }
    const Pipeline train_pipe =
        Pipeline::build(options.model, options.hops, options.repeats, train, &adjacency);
    const Pipeline test_pipe =
        Pipeline::build(options.model, options.hops, options.repeats, test, &adjacency);

    Eigen::VectorXd flat = options.model == ModelKind::qgcnn
                               ? flatten(init_qgcnn_params(options.seed, options.repeats))
                               : flatten(init_mlp_params(options.seed));
    const Eigen::Index n_params = flat.size();

    std::ofstream metrics;
    if (!options.metrics_path.empty()) {
        metrics.open(options.metrics_path, std::ios::binary | std::ios::trunc);
        if (!metrics) {
            throw IoError("cannot open \"" + options.metrics_path.string() +
                          "\" for writing");
        }
        metrics << "# model=" << to_string(options.model) << " epochs=" << options.epochs
                << " batch_size=" << options.batch_size << " seed=" << options.seed
                << " hops=" << options.hops << " repeats=" << options.repeats
                << " sigma=" << fmt_double(options.sigma)
                << " normalize_adjacency=" << (options.normalize_adjacency ? 1 : 0)
                << " eta=" << fmt_double(options.rmsprop.eta)
                << " alpha=" << fmt_double(options.rmsprop.alpha)
                << " epsilon=" << fmt_double(options.rmsprop.epsilon)
                << " train=" << options.train_label << " test=" << options.test_label
                << "\n";
        metrics << "epoch,train_loss,train_acc,test_loss,test_acc\n";
        metrics.flush();
    }

    auto dump_aborted_params = [&] {
        if (!options.checkpoint_path.empty()) {
            std::filesystem::path dump = options.checkpoint_path;
            dump += ".aborted";
            save_checkpoint(flat, dump);
        }
    };

    Rmsprop optimizer(options.rmsprop);
    Rng shuffle_rng = Rng::substream(options.seed, kShuffleStream);
    std::vector<int> order(train_pipe.size());
    std::iota(order.begin(), order.end(), 0);

    std::vector<Eigen::VectorXd> sample_grads(options.batch_size,
                                              Eigen::VectorXd(n_params));
    std::vector<double> sample_losses(options.batch_size);

    TrainResult result;
    result.history.reserve(options.epochs);
    for (int epoch = 1; epoch <= options.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        const int n = train_pipe.size();
        for (int start = 0; start < n; start += options.batch_size) {
            const int bsize = std::min(options.batch_size, n - start);
            if (options.model == ModelKind::qgcnn) {
                const ModelParams params = unflatten_qgcnn(flat, options.repeats);
                parallel_for(bsize, options.threads, [&](int i) {
                    const int s = order[start + i];
                    sample_losses[i] = qgcnn_sample_loss_grad(
                        params, train_pipe.encoded[s], train_pipe.label(s),
                        sample_grads[i]);
                });
            } else {
                const MlpParams params = unflatten_mlp(flat);
                parallel_for(bsize, options.threads, [&](int i) {
                    const int s = order[start + i];
                    sample_losses[i] = mlp_sample_loss_grad(
                        params, train.images[s], sample_grads[i]);
                });
            }
            // Reduce in slot order: bitwise identical for any thread count.
            double batch_loss = sample_losses[0];
            Eigen::VectorXd batch_grad = sample_grads[0];
            for (int i = 1; i < bsize; ++i) {
                batch_loss += sample_losses[i];
                batch_grad += sample_grads[i];
            }
            batch_loss /= bsize;
            batch_grad /= static_cast<double>(bsize);
            if (!std::isfinite(batch_loss) || !batch_grad.allFinite()) {
                dump_aborted_params();
                throw NumericError("non-finite loss or gradient in epoch " +
                                   std::to_string(epoch) + ", batch starting at sample " +
                                   std::to_string(start));
            }
            optimizer.step(flat, batch_grad);
        }

        const EvalResult on_train = eval_pipeline(train_pipe, flat, options.threads);
        const EvalResult on_test = eval_pipeline(test_pipe, flat, options.threads);
        EpochMetrics em;
        em.epoch = epoch;
        em.train_loss = on_train.loss;
        em.train_accuracy = on_train.accuracy;
        em.test_loss = on_test.loss;
        em.test_accuracy = on_test.accuracy;
        result.history.push_back(em);
        if (metrics.is_open()) {
            metrics << epoch << ',' << fmt_double(em.train_loss) << ','
                    << fmt_double(em.train_accuracy) << ',' << fmt_double(em.test_loss)
                    << ',' << fmt_double(em.test_accuracy) << "\n";
            metrics.flush();
            if (!metrics) {
                throw IoError("write to \"" + options.metrics_path.string() + "\" failed");
            }
        }
        if (log) {
            *log << "epoch " << epoch << "/" << options.epochs << " train_loss="
                 << em.train_loss << " train_acc=" << em.train_accuracy
                 << " test_loss=" << em.test_loss << " test_acc=" << em.test_accuracy
                 << std::endl;
        }
    }

    if (!options.checkpoint_path.empty()) {
        save_checkpoint(flat, options.checkpoint_path);
    }
    result.params = std::move(flat);
    return result;
}

EvalResult evaluate(const EvalOptions& options, const Eigen::VectorXd& params,
                    const Dataset& dataset) {
    check_dataset(dataset, "eval");
    Adjacency adjacency;
    if (options.model == ModelKind::qgcnn) {
        const ModelParams shape = ModelParams::zero(options.repeats);
        if (params.size() != shape.count()) {
            throw ConfigError("checkpoint has " + std::to_string(params.size()) +
                              " parameters, qgcnn with repeats=" +
                              std::to_string(options.repeats) + " needs " +
                              std::to_string(shape.count()));
        }
        adjacency = gaussian_pixel_adjacency(kImageSize, kImageSize, options.sigma);
        if (options.normalize_adjacency) adjacency = normalize_adjacency(adjacency);
    } else {
        if (params.size() != MlpParams::zero().count()) {
            throw ConfigError("checkpoint has " + std::to_string(params.size()) +
                              " parameters, mlp needs " +
                              std::to_string(MlpParams::zero().count()));
        }
    }
    const Pipeline pipe =
        Pipeline::build(options.model, options.hops, options.repeats, dataset, &adjacency);
    return eval_pipeline(pipe, params, options.threads);
}

} // namespace qgcnn
