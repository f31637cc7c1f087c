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

#include <filesystem>

#include <Eigen/Dense>

namespace qgcnn {

/// Binary checkpoint ("QGCN" format): magic, version, parameter count, a
/// reserved word, then the flattened parameters as little-endian float64.
/// The flattening order is the model's canonical one, so a checkpoint is
/// portable across machines and directly diffable byte by byte.
void save_checkpoint(const Eigen::VectorXd& params, const std::filesystem::path& path);
Eigen::VectorXd load_checkpoint(const std::filesystem::path& path);

} // namespace qgcnn
