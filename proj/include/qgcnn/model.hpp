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

#include <cstdint>
#include <numbers>
#include <span>

#include <Eigen/Dense>

#include "qgcnn/circuits.hpp"
#include "qgcnn/data.hpp"
#include "qgcnn/graphconv.hpp"

namespace qgcnn {

inline constexpr int kImageSize = 32;         // model input edge length
inline constexpr int kNumQubits = 10;         // 2^10 amplitudes = 32*32 pixels
inline constexpr int kNumClasses = 2;
inline constexpr int kDefaultRepeats = 3;
inline constexpr int kDefaultHops = 2;
inline constexpr double kDefaultSigma = 0.05 * std::numbers::pi;
inline constexpr int kMlpHidden = 128;

/// Full parameter set of the hybrid model: two variational blocks plus the
/// linear readout. With the defaults (10 qubits, 3 repeats) this is
/// 90 + 90 + 20 + 2 = 202 scalars.
///
/// Canonical flattening order (gradients, checkpoints): block1 angles in
/// layer-major order with (alpha, beta, gamma) per rotation, block2 angles
/// likewise, readout weights row-major (feature index outer, class index
/// inner), then the two biases.
struct ModelParams {
    BlockParams block1;
    BlockParams block2;
    Eigen::MatrixXd readout_w; // kNumQubits x kNumClasses
    Eigen::VectorXd readout_b; // kNumClasses

    static ModelParams zero(int repeats = kDefaultRepeats);
    Eigen::Index count() const;
    void validate() const;
};

Eigen::VectorXd flatten(const ModelParams& params);
ModelParams unflatten_qgcnn(const Eigen::Ref<const Eigen::VectorXd>& flat,
                            int repeats = kDefaultRepeats);

/// Seeded initialization: angles uniform in (-pi, pi), readout weights
/// uniform in (-1/sqrt(fan_in), +1/sqrt(fan_in)), biases zero. Draw order is
/// the canonical flattening order, so the result is platform-independent.
ModelParams init_qgcnn_params(std::uint64_t seed, int repeats = kDefaultRepeats);

/// Classical baseline: flatten -> 1024 x 128 dense + ReLU -> 128 x 2 dense.
/// 1024*128 + 128 + 128*2 + 2 = 131458 scalars. Same canonical flattening
/// scheme: w1 row-major, b1, w2 row-major, b2.
struct MlpParams {
    Eigen::MatrixXd w1; // 1024 x 128
    Eigen::VectorXd b1; // 128
    Eigen::MatrixXd w2; // 128 x 2
    Eigen::VectorXd b2; // 2

    static MlpParams zero();
    Eigen::Index count() const;
    void validate() const;
};

Eigen::VectorXd flatten(const MlpParams& params);
MlpParams unflatten_mlp(const Eigen::Ref<const Eigen::VectorXd>& flat);
MlpParams init_mlp_params(std::uint64_t seed);

/// Row-major flattening of an image into the vector fed to the graph stage.
Eigen::VectorXd flatten_image(const LabeledImage& image);

/// Graph-convolution preprocessing plus amplitude encoding: the state that
/// block1 consumes. Fixed per (image, adjacency, hops), so training caches it.
StateVector encode_image(const LabeledImage& image, const Adjacency& adjacency, int hops);

/// Intermediate values of one forward pass, needed by the backward pass.
struct QgcnnTrace {
    Eigen::VectorXd block1_out;  // m, 10 <Z> values in [-1, 1]
    Eigen::VectorXd features;    // t = tanh(m)
    Eigen::VectorXd block2_out;  // v
    Eigen::VectorXd logits;      // W^T v + b
};

QgcnnTrace qgcnn_trace(const ModelParams& params, const StateVector& encoded);

Eigen::VectorXd qgcnn_forward(const ModelParams& params, const LabeledImage& image,
                              const Adjacency& adjacency, int hops);

struct LossGrad {
    double loss = 0.0;
    Eigen::VectorXd grad;
};

/// Loss and full gradient for one pre-encoded sample. Readout gradients are
/// analytic; both blocks' angles use the parameter-shift rule; the chain from
/// block2 back to block1 runs through shifted re-encodings (arctan factors)
/// and the tanh derivative. Writes the canonical-order gradient into `grad`
/// and returns the sample loss.
double qgcnn_sample_loss_grad(const ModelParams& params, const StateVector& encoded,
                              int label, Eigen::Ref<Eigen::VectorXd> grad);

/// Mean loss and mean gradient over a batch, summed in sample order.
LossGrad qgcnn_loss_and_grad(const ModelParams& params,
                             std::span<const LabeledImage> batch,
                             const Adjacency& adjacency, int hops);

/// Same, over samples that were encoded once up front.
LossGrad qgcnn_loss_and_grad_cached(const ModelParams& params,
                                    std::span<const StateVector> encoded,
                                    std::span<const int> labels);

Eigen::VectorXd mlp_forward(const MlpParams& params, const LabeledImage& image);
double mlp_sample_loss_grad(const MlpParams& params, const LabeledImage& image,
                            Eigen::Ref<Eigen::VectorXd> grad);
LossGrad mlp_loss_and_grad(const MlpParams& params, std::span<const LabeledImage> batch);

/// Class decision: argmax of the logits, ties resolved to class 0.
int predict(const Eigen::Ref<const Eigen::VectorXd>& logits);

} // namespace qgcnn
