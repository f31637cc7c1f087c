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
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qgcnn/errors.hpp"

namespace qgcnn {

/// Particle morphologies the synthetic generator can draw.
enum class ParticleKind { track, shower, kink, heavy_track };

const char* to_string(ParticleKind kind);
ParticleKind particle_kind_from_string(const std::string& name);

/// One grayscale image with its binary class index. Pixels are nonnegative
/// energy deposits, stored as doubles whose values are exactly representable
/// in float32 (the on-disk precision), so save/load round-trips bitwise.
struct LabeledImage {
    Eigen::MatrixXd pixels; // (row, col)
    int label = 0;
};

/// A list of images plus bookkeeping about where they came from.
struct Dataset {
    enum class Split { train, test, unknown };

    std::vector<LabeledImage> images;
    std::array<std::string, 2> class_names = {"class0", "class1"};
    Split split = Split::unknown;

    int height() const { return images.empty() ? 0 : static_cast<int>(images[0].pixels.rows()); }
    int width() const { return images.empty() ? 0 : static_cast<int>(images[0].pixels.cols()); }
};

/// Generator configuration. Counts are totals per split, divided as evenly
/// as possible between the two classes (class_a gets the extra odd sample).
struct GeneratorConfig {
    ParticleKind class_a = ParticleKind::track;
    ParticleKind class_b = ParticleKind::shower;
    int train_count = 160;
    int test_count = 40;
    double noise_level = 0.1;
    std::uint64_t seed = 0;
};

/// Draws a fresh (train, test) pair. Native canvas is 30x30; every image is
/// padded to 32x32 with a zero border afterwards, so the returned images are
/// amplitude-encodable on 10 qubits directly. Train and test consume disjoint
/// random substreams of the seed: generating more of one cannot change the
/// other, and the two splits never share an image.
std::pair<Dataset, Dataset> generate(const GeneratorConfig& config);

/// Copies `image` into the top-left corner of a size x size zero canvas.
LabeledImage pad_to(const LabeledImage& image, int size);

/// Binary dataset file ("QGCD" format): magic, version, count, height, width,
/// then per sample a label byte and row-major float32 pixels, little-endian.
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);

/// Per-class count and intensity statistics, the basis of the CLI summary.
struct ClassStats {
    int count = 0;
    double mean_intensity = 0.0;   // mean over all pixels of the class
    double max_intensity = 0.0;
    double nonzero_fraction = 0.0; // pixels above zero
};

std::array<ClassStats, 2> summarize(const Dataset& dataset);

} // namespace qgcnn
