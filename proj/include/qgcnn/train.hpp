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

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qgcnn/data.hpp"
#include "qgcnn/model.hpp"
#include "qgcnn/optim.hpp"

namespace qgcnn {

enum class ModelKind { qgcnn, mlp };

const char* to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

/// Everything a run depends on. A (TrainOptions, seed, dataset) triple pins
/// the result bit for bit; `threads` only changes wall time, never output.
struct TrainOptions {
    ModelKind model = ModelKind::qgcnn;
    int epochs = 30;
    int batch_size = 8;
    std::uint64_t seed = 0;
    int hops = kDefaultHops;
    int repeats = kDefaultRepeats;
    double sigma = kDefaultSigma;
    bool normalize_adjacency = false;
    Rmsprop::Options rmsprop;
    int threads = 0; // 0 = all hardware threads, 1 = serial
    std::filesystem::path metrics_path;    // empty: no CSV
    std::filesystem::path checkpoint_path; // empty: no checkpoint
    std::string train_label = "train";     // recorded in the CSV config comment
    std::string test_label = "test";
};

struct EpochMetrics {
    int epoch = 0;
    double train_loss = 0.0;
    double train_accuracy = 0.0;
    double test_loss = 0.0;
    double test_accuracy = 0.0;
};

struct TrainResult {
    std::vector<EpochMetrics> history;
    Eigen::VectorXd params; // final flattened parameters
};

/// Mini-batch RMSProp training. Shuffles with a seeded Fisher-Yates per
/// epoch, averages per-sample gradients in index order (so multi-threaded
/// batches reduce to the same bits as serial ones), appends one CSV row per
/// epoch, and writes the final checkpoint. A non-finite loss or gradient
/// aborts with a NumericError after dumping the current parameters to
/// "<checkpoint_path>.aborted".
TrainResult train_model(const TrainOptions& options, const Dataset& train,
                        const Dataset& test, std::ostream* log = nullptr);

struct EvalOptions {
    ModelKind model = ModelKind::qgcnn;
    int hops = kDefaultHops;
    int repeats = kDefaultRepeats;
    double sigma = kDefaultSigma;
    bool normalize_adjacency = false;
    int threads = 0;
};

struct EvalResult {
    double loss = 0.0;
    double accuracy = 0.0;
    int count = 0;
    std::array<std::array<int, 2>, 2> confusion{}; // [true label][prediction]
};

/// Mean cross-entropy, accuracy, and confusion counts of flattened
/// parameters on a dataset, using the same pipeline as training.
EvalResult evaluate(const EvalOptions& options, const Eigen::VectorXd& params,
                    const Dataset& dataset);

/// Runs fn(0..count-1) on up to `threads` workers (0 = hardware threads).
/// Indices are claimed dynamically; callers must write only to per-index
/// slots so the result cannot depend on the schedule.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

} // namespace qgcnn
