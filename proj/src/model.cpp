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

#include "qgcnn/model.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "qgcnn/autodiff.hpp"
#include "qgcnn/rng.hpp"

namespace qgcnn {

namespace {

// Substream ids for seeded parameter draws. Data generation uses 0 and 1
// under its own seed; keeping these distinct avoids accidental correlation
// when one seed value is reused for both purposes.
constexpr std::uint64_t kInitStreamQgcnn = 2;
constexpr std::uint64_t kInitStreamMlp = 4;

void fill_angles_uniform(BlockParams& block, Rng& rng) {
    for (Eigen::Index r = 0; r < block.angles.rows(); ++r) {
        for (int k = 0; k < 3; ++k) {
            block.angles(r, k) = rng.uniform(-std::numbers::pi, std::numbers::pi);
        }
    }
}

void fill_matrix_uniform(Eigen::MatrixXd& m, double bound, Rng& rng) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            m(i, j) = rng.uniform(-bound, bound);
        }
    }
}

} // namespace

ModelParams ModelParams::zero(int repeats) {
    ModelParams p;
    p.block1 = BlockParams::Zero(kNumQubits, repeats);
    p.block2 = BlockParams::Zero(kNumQubits, repeats);
    p.readout_w = Eigen::MatrixXd::Zero(kNumQubits, kNumClasses);
    p.readout_b = Eigen::VectorXd::Zero(kNumClasses);
    return p;
}

Eigen::Index ModelParams::count() const {
    return block1.count() + block2.count() + readout_w.size() + readout_b.size();
}

void ModelParams::validate() const {
    block1.validate();
    block2.validate();
    if (block1.num_qubits != kNumQubits || block2.num_qubits != kNumQubits) {
        throw UsageError("model blocks must act on " + std::to_string(kNumQubits) +
                         " qubits");
    }
    if (readout_w.rows() != kNumQubits || readout_w.cols() != kNumClasses ||
        readout_b.size() != kNumClasses) {
        throw UsageError("readout must map " + std::to_string(kNumQubits) +
                         " features to " + std::to_string(kNumClasses) + " classes");
    }
}

Eigen::VectorXd flatten(const ModelParams& params) {
    params.validate();
    Eigen::VectorXd flat(params.count());
    Eigen::Index k = 0;
    for (const BlockParams* block : {&params.block1, &params.block2}) {
        for (Eigen::Index r = 0; r < block->angles.rows(); ++r) {
            for (int c = 0; c < 3; ++c) flat[k++] = block->angles(r, c);
        }
    }
    for (Eigen::Index i = 0; i < params.readout_w.rows(); ++i) {
        for (Eigen::Index j = 0; j < params.readout_w.cols(); ++j) {
            flat[k++] = params.readout_w(i, j);
        }
    }
    for (Eigen::Index i = 0; i < params.readout_b.size(); ++i) {
        flat[k++] = params.readout_b[i];
    }
    return flat;
}

ModelParams unflatten_qgcnn(const Eigen::Ref<const Eigen::VectorXd>& flat, int repeats) {
    ModelParams p = ModelParams::zero(repeats);
    if (flat.size() != p.count()) {
        throw UsageError("parameter vector has " + std::to_string(flat.size()) +
                         " entries, model with repeats=" + std::to_string(repeats) +
                         " needs " + std::to_string(p.count()));
    }
    Eigen::Index k = 0;
    for (BlockParams* block : {&p.block1, &p.block2}) {
        for (Eigen::Index r = 0; r < block->angles.rows(); ++r) {
            for (int c = 0; c < 3; ++c) block->angles(r, c) = flat[k++];
        }
    }
    for (Eigen::Index i = 0; i < p.readout_w.rows(); ++i) {
        for (Eigen::Index j = 0; j < p.readout_w.cols(); ++j) {
            p.readout_w(i, j) = flat[k++];
        }
    }
    for (Eigen::Index i = 0; i < p.readout_b.size(); ++i) {
        p.readout_b[i] = flat[k++];
    }
    return p;
}

ModelParams init_qgcnn_params(std::uint64_t seed, int repeats) {
    ModelParams p = ModelParams::zero(repeats);
    Rng rng = Rng::substream(seed, kInitStreamQgcnn);
    fill_angles_uniform(p.block1, rng);
    fill_angles_uniform(p.block2, rng);
    fill_matrix_uniform(p.readout_w, 1.0 / std::sqrt(double(kNumQubits)), rng);
    // biases stay zero
    return p;
}

MlpParams MlpParams::zero() {
    MlpParams p;
    p.w1 = Eigen::MatrixXd::Zero(kImageSize * kImageSize, kMlpHidden);
    p.b1 = Eigen::VectorXd::Zero(kMlpHidden);
    p.w2 = Eigen::MatrixXd::Zero(kMlpHidden, kNumClasses);
    p.b2 = Eigen::VectorXd::Zero(kNumClasses);
    return p;
}

Eigen::Index MlpParams::count() const {
    return w1.size() + b1.size() + w2.size() + b2.size();
}

void MlpParams::validate() const {
    if (w1.rows() != kImageSize * kImageSize || w1.cols() != kMlpHidden ||
        b1.size() != kMlpHidden || w2.rows() != kMlpHidden ||
        w2.cols() != kNumClasses || b2.size() != kNumClasses) {
        throw UsageError("mlp parameter shapes do not match the 1024-128-2 layout");
    }
}

Eigen::VectorXd flatten(const MlpParams& params) {
    params.validate();
    Eigen::VectorXd flat(params.count());
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < params.w1.rows(); ++i) {
        for (Eigen::Index j = 0; j < params.w1.cols(); ++j) flat[k++] = params.w1(i, j);
    }
    for (Eigen::Index i = 0; i < params.b1.size(); ++i) flat[k++] = params.b1[i];
    for (Eigen::Index i = 0; i < params.w2.rows(); ++i) {
        for (Eigen::Index j = 0; j < params.w2.cols(); ++j) flat[k++] = params.w2(i, j);
    }
    for (Eigen::Index i = 0; i < params.b2.size(); ++i) flat[k++] = params.b2[i];
    return flat;
}

MlpParams unflatten_mlp(const Eigen::Ref<const Eigen::VectorXd>& flat) {
    MlpParams p = MlpParams::zero();
    if (flat.size() != p.count()) {
        throw UsageError("parameter vector has " + std::to_string(flat.size()) +
                         " entries, mlp needs " + std::to_string(p.count()));
    }
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < p.w1.rows(); ++i) {
        for (Eigen::Index j = 0; j < p.w1.cols(); ++j) p.w1(i, j) = flat[k++];
    }
    for (Eigen::Index i = 0; i < p.b1.size(); ++i) p.b1[i] = flat[k++];
    for (Eigen::Index i = 0; i < p.w2.rows(); ++i) {
        for (Eigen::Index j = 0; j < p.w2.cols(); ++j) p.w2(i, j) = flat[k++];
    }
    for (Eigen::Index i = 0; i < p.b2.size(); ++i) p.b2[i] = flat[k++];
    return p;
}

MlpParams init_mlp_params(std::uint64_t seed) {
    MlpParams p = MlpParams::zero();
    Rng rng = Rng::substream(seed, kInitStreamMlp);
    fill_matrix_uniform(p.w1, 1.0 / std::sqrt(double(p.w1.rows())), rng);
    fill_matrix_uniform(p.w2, 1.0 / std::sqrt(double(p.w2.rows())), rng);
    // biases stay zero
    return p;
}

Eigen::VectorXd flatten_image(const LabeledImage& image) {
    const auto rows = image.pixels.rows();
    const auto cols = image.pixels.cols();
    Eigen::VectorXd v(rows * cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) v[r * cols + c] = image.pixels(r, c);
    }
    return v;
}

StateVector encode_image(const LabeledImage& image, const Adjacency& adjacency, int hops) {
    if (image.pixels.rows() != kImageSize || image.pixels.cols() != kImageSize) {
        throw UsageError("model input must be " + std::to_string(kImageSize) + "x" +
                         std::to_string(kImageSize) + ", got " +
                         std::to_string(image.pixels.rows()) + "x" +
                         std::to_string(image.pixels.cols()));
    }
    return amplitude_encode<double>(aggregate(adjacency, flatten_image(image), hops));
}

namespace {

/// States right before each layer of a block: prefix[r] reproduces the run
/// up to (but not including) layer r bitwise. Shift-rule evaluations restart
/// from these instead of re-running the whole block.
std::vector<StateVector> layer_prefixes(const StateVector& initial,
                                        const BlockParams& block) {
    std::vector<StateVector> prefixes;
    prefixes.reserve(block.repeats);
    StateVector state = initial;
    prefixes.push_back(state);
    for (int layer = 0; layer + 1 < block.repeats; ++layer) {
        entangling_layer(state);
        for (int q = 0; q < block.num_qubits; ++q) {
            apply_rot(state, q, block.rotation(layer, q));
        }
        prefixes.push_back(state);
    }
    return prefixes;
}

/// Finishes a block run from layer `start`, optionally adding `delta` to one
/// Euler component of the rotation on (`start`, `shift_qubit`). The applied
/// operation sequence matches run_block exactly, so delta = 0 reproduces the
/// unshifted outputs bit for bit.
Eigen::VectorXd run_from_layer(StateVector state, const BlockParams& block, int start,
                               int shift_qubit, int shift_comp, double delta) {
    for (int layer = start; layer < block.repeats; ++layer) {
        entangling_layer(state);
        for (int q = 0; q < block.num_qubits; ++q) {
            RotationTriple rot = block.rotation(layer, q);
            if (layer == start && q == shift_qubit) {
                if (shift_comp == 0) rot.alpha += delta;
                else if (shift_comp == 1) rot.beta += delta;
                else rot.gamma += delta;
            }
            apply_rot(state, q, rot);
        }
    }
    return all_expect_z(state);
}

/// dL/d(angle) for every angle of one block via the parameter-shift rule,
/// where `upstream` is dL/d(block outputs). Writes block.count() entries in
/// canonical order starting at grad[offset]. Returns the entry count.
Eigen::Index block_shift_grads(const std::vector<StateVector>& prefixes,
                               const BlockParams& block,
                               const Eigen::VectorXd& upstream,
                               Eigen::Ref<Eigen::VectorXd> grad, Eigen::Index offset) {
    Eigen::Index k = offset;
    for (int layer = 0; layer < block.repeats; ++layer) {
        for (int q = 0; q < block.num_qubits; ++q) {
            for (int comp = 0; comp < 3; ++comp) {
                const Eigen::VectorXd plus =
                    run_from_layer(prefixes[layer], block, layer, q, comp, kParamShift);
                const Eigen::VectorXd minus =
                    run_from_layer(prefixes[layer], block, layer, q, comp, -kParamShift);
                grad[k++] = upstream.dot(0.5 * (plus - minus));
            }
        }
    }
    return k - offset;
}

} // namespace

QgcnnTrace qgcnn_trace(const ModelParams& params, const StateVector& encoded) {
    params.validate();
    QgcnnTrace trace;
    trace.block1_out = run_block(encoded, params.block1);
    trace.features = trace.block1_out.array().tanh();
    const StateVector mid = variational_encode<double>(trace.features);
    trace.block2_out = run_block(mid, params.block2);
    trace.logits = params.readout_w.transpose() * trace.block2_out + params.readout_b;
    return trace;
}

Eigen::VectorXd qgcnn_forward(const ModelParams& params, const LabeledImage& image,
                              const Adjacency& adjacency, int hops) {
    return qgcnn_trace(params, encode_image(image, adjacency, hops)).logits;
}

double qgcnn_sample_loss_grad(const ModelParams& params, const StateVector& encoded,
                              int label, Eigen::Ref<Eigen::VectorXd> grad) {
    params.validate();
    if (grad.size() != params.count()) {
        throw UsageError("gradient buffer has " + std::to_string(grad.size()) +
                         " entries, model needs " + std::to_string(params.count()));
    }
    const int nq = params.block1.num_qubits;

    // Forward pass, reusing the layer prefixes the shift rule needs anyway.
    const std::vector<StateVector> prefixes1 = layer_prefixes(encoded, params.block1);
    const Eigen::VectorXd m =
        run_from_layer(prefixes1.back(), params.block1, params.block1.repeats - 1, -1, 0, 0.0);
    const Eigen::VectorXd t = m.array().tanh();
    Eigen::VectorXd ry(nq), rz(nq);
    for (int i = 0; i < nq; ++i) {
        ry[i] = std::atan(t[i]);
        rz[i] = std::atan(t[i] * t[i]);
    }
    const StateVector mid = encode_with_angles<double>(ry, rz);
    const std::vector<StateVector> prefixes2 = layer_prefixes(mid, params.block2);
    const Eigen::VectorXd v =
        run_from_layer(prefixes2.back(), params.block2, params.block2.repeats - 1, -1, 0, 0.0);
    const Eigen::VectorXd logits = params.readout_w.transpose() * v + params.readout_b;

    // Readout: analytic.
    const ClassicalGrads cg = classical_grads(logits, label, v, params.readout_w);

    const Eigen::Index n1 = params.block1.count();
    const Eigen::Index n2 = params.block2.count();

    // Block2 angles: shift rule against dL/dv.
    block_shift_grads(prefixes2, params.block2, cg.d_features, grad, n1);

    // dL/dt: shift each encoding angle of each feature, then chain through
    // the arctan derivatives.
    Eigen::VectorXd d_t(nq);
    for (int i = 0; i < nq; ++i) {
        auto block2_out = [&](double ry_i, double rz_i) {
            Eigen::VectorXd ry2 = ry, rz2 = rz;
            ry2[i] = ry_i;
            rz2[i] = rz_i;
            return run_block(encode_with_angles<double>(ry2, rz2), params.block2);
        };
        const Eigen::VectorXd g_ry =
            0.5 * (block2_out(ry[i] + kParamShift, rz[i]) -
                   block2_out(ry[i] - kParamShift, rz[i]));
        const Eigen::VectorXd g_rz =
            0.5 * (block2_out(ry[i], rz[i] + kParamShift) -
                   block2_out(ry[i], rz[i] - kParamShift));
        const auto [d_ry, d_rz] = encoding_angle_derivatives(t[i]);
        d_t[i] = cg.d_features.dot(g_ry * d_ry + g_rz * d_rz);
    }

    // Through tanh: dL/dm = dL/dt * (1 - t^2).
    const Eigen::VectorXd d_m = d_t.array() * (1.0 - t.array().square());

    // Block1 angles: shift rule against dL/dm.
    block_shift_grads(prefixes1, params.block1, d_m, grad, 0);

    // Readout entries in canonical order: W row-major, then biases.
    Eigen::Index k = n1 + n2;
    for (int i = 0; i < nq; ++i) {
        for (int j = 0; j < kNumClasses; ++j) grad[k++] = cg.d_weights(i, j);
    }
    for (int j = 0; j < kNumClasses; ++j) grad[k++] = cg.d_bias[j];
    return cg.loss;
}

LossGrad qgcnn_loss_and_grad_cached(const ModelParams& params,
                                    std::span<const StateVector> encoded,
                                    std::span<const int> labels) {
    if (encoded.size() != labels.size() || encoded.empty()) {
        throw UsageError("batch must be nonempty with one label per state");
    }
    LossGrad out;
    out.grad = Eigen::VectorXd::Zero(params.count());
    Eigen::VectorXd sample_grad(params.count());
    for (std::size_t i = 0; i < encoded.size(); ++i) {
        out.loss += qgcnn_sample_loss_grad(params, encoded[i], labels[i], sample_grad);
        out.grad += sample_grad;
    }
    const double inv = 1.0 / static_cast<double>(encoded.size());
    out.loss *= inv;
    out.grad *= inv;
    return out;
}

LossGrad qgcnn_loss_and_grad(const ModelParams& params,
                             std::span<const LabeledImage> batch,
                             const Adjacency& adjacency, int hops) {
    if (batch.empty()) throw UsageError("batch must be nonempty");
    std::vector<StateVector> encoded;
    std::vector<int> labels;
    encoded.reserve(batch.size());
    labels.reserve(batch.size());
    for (const auto& image : batch) {
        encoded.push_back(encode_image(image, adjacency, hops));
        labels.push_back(image.label);
    }
    return qgcnn_loss_and_grad_cached(params, encoded, labels);
}

Eigen::VectorXd mlp_forward(const MlpParams& params, const LabeledImage& image) {
    params.validate();
    const Eigen::VectorXd x = flatten_image(image);
    if (x.size() != params.w1.rows()) {
        throw UsageError("mlp input has " + std::to_string(x.size()) +
                         " pixels, expected " + std::to_string(params.w1.rows()));
    }
    const Eigen::VectorXd h = (params.w1.transpose() * x + params.b1).cwiseMax(0.0);
    return params.w2.transpose() * h + params.b2;
}

double mlp_sample_loss_grad(const MlpParams& params, const LabeledImage& image,
                            Eigen::Ref<Eigen::VectorXd> grad) {
    params.validate();
    if (grad.size() != params.count()) {
        throw UsageError("gradient buffer has " + std::to_string(grad.size()) +
                         " entries, mlp needs " + std::to_string(params.count()));
    }
    const Eigen::VectorXd x = flatten_image(image);
    if (x.size() != params.w1.rows()) {
        throw UsageError("mlp input has " + std::to_string(x.size()) +
                         " pixels, expected " + std::to_string(params.w1.rows()));
    }
    const Eigen::VectorXd z1 = params.w1.transpose() * x + params.b1;
    const Eigen::VectorXd h = z1.cwiseMax(0.0);
    const Eigen::VectorXd logits = params.w2.transpose() * h + params.b2;
    const SoftmaxCrossEntropy ce = softmax_cross_entropy(logits, image.label);

    const Eigen::VectorXd d_h = params.w2 * ce.d_logits;
    Eigen::VectorXd d_z1 = d_h;
    for (Eigen::Index i = 0; i < z1.size(); ++i) {
        if (!(z1[i] > 0.0)) d_z1[i] = 0.0;
    }

    // Flattened gradient in canonical order: w1 row-major, b1, w2 row-major, b2.
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < params.w1.rows(); ++i) {
        for (Eigen::Index j = 0; j < params.w1.cols(); ++j) grad[k++] = x[i] * d_z1[j];
    }
    for (Eigen::Index j = 0; j < params.b1.size(); ++j) grad[k++] = d_z1[j];
    for (Eigen::Index i = 0; i < params.w2.rows(); ++i) {
        for (Eigen::Index j = 0; j < params.w2.cols(); ++j) grad[k++] = h[i] * ce.d_logits[j];
    }
    for (Eigen::Index j = 0; j < params.b2.size(); ++j) grad[k++] = ce.d_logits[j];
    return ce.loss;
}

LossGrad mlp_loss_and_grad(const MlpParams& params, std::span<const LabeledImage> batch) {
    if (batch.empty()) throw UsageError("batch must be nonempty");
    LossGrad out;
    out.grad = Eigen::VectorXd::Zero(params.count());
    Eigen::VectorXd sample_grad(params.count());
    for (const auto& image : batch) {
        out.loss += mlp_sample_loss_grad(params, image, sample_grad);
        out.grad += sample_grad;
    }
    const double inv = 1.0 / static_cast<double>(batch.size());
    out.loss *= inv;
    out.grad *= inv;
    return out;
}

int predict(const Eigen::Ref<const Eigen::VectorXd>& logits) {
    if (logits.size() != kNumClasses) {
        throw UsageError("predict expects " + std::to_string(kNumClasses) + " logits");
    }
    return logits[1] > logits[0] ? 1 : 0;
}

} // namespace qgcnn
