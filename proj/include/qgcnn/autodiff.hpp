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

#include <cmath>
#include <numbers>
#include <utility>

#include <Eigen/Dense>

#include "qgcnn/errors.hpp"

namespace qgcnn {

/// Shift used by the exact two-point gradient rule for rotation gates.
inline constexpr double kParamShift = std::numbers::pi / 2;

/// Exact derivative of an expectation value f with respect to one rotation
/// angle: f'(theta) = (f(theta + pi/2) - f(theta - pi/2)) / 2. Holds exactly
/// (up to simulation roundoff) for any gate generated by a Pauli, which
/// covers every Ry, Rz, and Rot Euler angle in this model. Exactly two
/// evaluations of f.
template <typename F>
double param_shift(F&& f, double theta) {
    return 0.5 * (f(theta + kParamShift) - f(theta - kParamShift));
}

/// Central finite difference, the reference the shift rule is checked
/// against: (f(theta + h) - f(theta - h)) / (2h).
template <typename F>
double finite_diff(F&& f, double theta, double h) {
    if (!(h > 0.0)) throw UsageError("finite_diff requires h > 0");
    return (f(theta + h) - f(theta - h)) / (2.0 * h);
}

/// d/dx of the two encoding angles ry = arctan(x), rz = arctan(x^2):
/// (1 / (1 + x^2), 2x / (1 + x^4)).
inline std::pair<double, double> encoding_angle_derivatives(double x) {
    return {1.0 / (1.0 + x * x), 2.0 * x / (1.0 + x * x * x * x)};
}

/// Derivative of f with respect to the INPUT x of the variational encoding
/// of one feature. f(ry_angle, rz_angle) must evaluate the downstream
/// expectation with the two encoding angles of that feature overridden.
/// Chain rule: shift each angle (two evaluations each), then scale by the
/// analytic arctan derivatives. Four evaluations of f in total.
template <typename F>
double encoding_input_grad(F&& f, double x) {
    const double ry = std::atan(x);
    const double rz = std::atan(x * x);
    const double g_ry = 0.5 * (f(ry + kParamShift, rz) - f(ry - kParamShift, rz));
    const double g_rz = 0.5 * (f(ry, rz + kParamShift) - f(ry, rz - kParamShift));
    const auto [d_ry, d_rz] = encoding_angle_derivatives(x);
    return g_ry * d_ry + g_rz * d_rz;
}

/// Loss and logit gradient of softmax cross-entropy for one sample.
/// Numerically stabilized by subtracting the max logit before exponentiating.
struct SoftmaxCrossEntropy {
    double loss;
    Eigen::VectorXd d_logits; // softmax(logits) - one_hot(label)
};

inline SoftmaxCrossEntropy softmax_cross_entropy(
    const Eigen::Ref<const Eigen::VectorXd>& logits, int label) {
    if (label < 0 || label >= logits.size()) {
        throw UsageError("label " + std::to_string(label) + " out of range for " +
                         std::to_string(logits.size()) + " classes");
    }
    const double m = logits.maxCoeff();
    Eigen::VectorXd p(logits.size());
    double z = 0.0;
    for (Eigen::Index i = 0; i < logits.size(); ++i) {
        p[i] = std::exp(logits[i] - m);
        z += p[i];
    }
    p /= z;
    SoftmaxCrossEntropy out;
    out.loss = -(logits[label] - m - std::log(z));
    out.d_logits = p;
    out.d_logits[label] -= 1.0;
    return out;
}

/// Gradients of the classical readout layer logits = W^T features + b under
/// softmax cross-entropy. Returns the loss together with dL/dfeatures (what
/// the quantum layers receive), dL/dW, and dL/db. W has one row per feature
/// and one column per class; it is needed to push the logit gradient back
/// onto the features.
struct ClassicalGrads {
    double loss;
    Eigen::VectorXd d_logits;
    Eigen::VectorXd d_features;
    Eigen::MatrixXd d_weights;
    Eigen::VectorXd d_bias;
};

inline ClassicalGrads classical_grads(const Eigen::Ref<const Eigen::VectorXd>& logits,
                                      int label,
                                      const Eigen::Ref<const Eigen::VectorXd>& features,
                                      const Eigen::Ref<const Eigen::MatrixXd>& weights) {
    if (weights.rows() != features.size() || weights.cols() != logits.size()) {
        throw UsageError("classical_grads: weight shape " + std::to_string(weights.rows()) +
                         "x" + std::to_string(weights.cols()) + " does not map " +
                         std::to_string(features.size()) + " features to " +
                         std::to_string(logits.size()) + " logits");
    }
    const SoftmaxCrossEntropy ce = softmax_cross_entropy(logits, label);
    ClassicalGrads out;
    out.loss = ce.loss;
    out.d_logits = ce.d_logits;
    out.d_features = weights * ce.d_logits;
    out.d_weights = features * ce.d_logits.transpose();
    out.d_bias = ce.d_logits;
    return out;
}

} // namespace qgcnn
