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
#include <string>

#include <Eigen/Dense>

#include "qgcnn/errors.hpp"

namespace qgcnn {

/// RMSProp with the running average seeded from the first gradient:
///
///   E[g^2]_0 = g_0 * g_0
///   E[g^2]_t = alpha * E[g^2]_{t-1} + (1 - alpha) * g_t * g_t   (t >= 1)
///   theta   -= eta * g_t / (sqrt(E[g^2]_t) + epsilon)
///
/// Seeding from g_0^2 rather than zero means the very first update has
/// magnitude ~eta in every coordinate instead of being inflated by a tiny
/// denominator. All updates are elementwise, so the result is independent of
/// parameter ordering.
class Rmsprop {
  public:
    struct Options {
        double eta = 0.01;
        double alpha = 0.99;
        double epsilon = 1e-8;
    };

    Rmsprop() : Rmsprop(Options()) {}

    explicit Rmsprop(Options opts) : opts_(opts) {
        if (!(opts_.eta > 0.0)) throw ConfigError("rmsprop eta must be > 0");
        if (!(opts_.alpha >= 0.0 && opts_.alpha < 1.0)) {
            throw ConfigError("rmsprop alpha must lie in [0, 1)");
        }
        if (!(opts_.epsilon > 0.0)) throw ConfigError("rmsprop epsilon must be > 0");
    }

    const Options& options() const { return opts_; }
    long step_count() const { return steps_; }
    const Eigen::VectorXd& sq_avg() const { return sq_avg_; }

    /// One update in place. The gradient length is fixed by the first call.
    void step(Eigen::Ref<Eigen::VectorXd> params,
              const Eigen::Ref<const Eigen::VectorXd>& grad) {
        if (params.size() != grad.size()) {
            throw UsageError("rmsprop: params length " + std::to_string(params.size()) +
                             " != grad length " + std::to_string(grad.size()));
        }
        if (steps_ == 0) {
            sq_avg_ = grad.array().square();
        } else {
            if (grad.size() != sq_avg_.size()) {
                throw UsageError("rmsprop: gradient length changed between steps");
            }
            sq_avg_ = opts_.alpha * sq_avg_.array() +
                      (1.0 - opts_.alpha) * grad.array().square();
        }
        params.array() -= opts_.eta * grad.array() / (sq_avg_.array().sqrt() + opts_.epsilon);
        ++steps_;
    }

  private:
    Options opts_;
    Eigen::VectorXd sq_avg_;
    long steps_ = 0;
};

} // namespace qgcnn
