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

#include "qgcnn/data.hpp"

#include <cmath>
#include <cstdint>
#include <deque>
#include <fstream>
#include <numbers>

#include "qgcnn/rng.hpp"
#include "qgcnn/serialize.hpp"

namespace qgcnn {

namespace {

// Native canvas; generated events are padded to the model's 32x32 afterwards.
constexpr int kCanvas = 30;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Stroke geometry works in (x, y) = (column, row) coordinates, with the
// center of pixel (r, c) at (c, r). All classes develop along a common +x
// beam axis with small per-event angular jitter, as in single-particle
// test-beam images; events enter near the left edge of the canvas.

/// Bilinear deposit of `amount` at a fractional position. Parts that fall
/// outside the canvas are dropped.
void deposit(Eigen::MatrixXd& px, double x, double y, double amount) {
    const int c0 = static_cast<int>(std::floor(x));
    const int r0 = static_cast<int>(std::floor(y));
    const double fx = x - c0;
    const double fy = y - r0;
    const double w00 = (1.0 - fx) * (1.0 - fy);
    const double w01 = fx * (1.0 - fy);
    const double w10 = (1.0 - fx) * fy;
    const double w11 = fx * fy;
    auto add = [&](int r, int c, double w) {
        if (r >= 0 && r < kCanvas && c >= 0 && c < kCanvas && w > 0.0) {
            px(r, c) += amount * w;
        }
    };
    add(r0, c0, w00);
    add(r0, c0 + 1, w01);
    add(r0 + 1, c0, w10);
    add(r0 + 1, c0 + 1, w11);
}

struct WobbleSpec {
    double amplitude = 0.0;  // peak perpendicular offset, pixels
    double wavelength = 14.0;
    double phase = 0.0;
};

/// Single-pixel-width anti-aliased stroke from (x0, y0) to (x1, y1). The
/// deposit rate is per unit arc length with small per-step jitter; the
/// wobble displaces sample points perpendicular to the segment, so the
/// stroke stays within `amplitude` of the ideal line.
void stroke(Eigen::MatrixXd& px, double x0, double y0, double x1, double y1,
            double rate, const WobbleSpec& wobble, double rate_jitter, Rng& rng) {
    const double dx = x1 - x0;
    const double dy = y1 - y0;
    const double len = std::hypot(dx, dy);
    if (!(len > 0.0)) return;
    const double ux = dx / len;
    const double uy = dy / len;
    const double nx = -uy;
    const double ny = ux;
    const int steps = std::max(2, static_cast<int>(std::ceil(len / 0.25)));
    const double ds = len / steps;
    for (int s = 0; s < steps; ++s) {
        const double t = (s + 0.5) * ds;
        const double off =
            wobble.amplitude * std::sin(kTwoPi * t / wobble.wavelength + wobble.phase);
        const double jitter = 1.0 + rate_jitter * (2.0 * rng.uniform() - 1.0);
        deposit(px, x0 + t * ux + off * nx, y0 + t * uy + off * ny, rate * ds * jitter);
    }
}

/// Straight minimum-ionizing track (or a heavier, brighter, stiffer one).
/// The wobble amplitude bounds the perpendicular excursion, and bilinear
/// spreading adds at most sqrt(2), so every lit pixel stays well within
/// 2 px of the underlying line.
void draw_track(Eigen::MatrixXd& px, Rng& rng, double rate, double wobble_amp,
                double jitter, double min_wavelength, double max_wavelength) {
    const double x0 = rng.uniform(2.0, 4.0);
    const double y0 = rng.uniform(8.0, 22.0);
    const double phi = jitter * rng.uniform(-1.0, 1.0);
    const double len = rng.uniform(20.0, 25.0);
    WobbleSpec wobble{wobble_amp, rng.uniform(min_wavelength, max_wavelength),
                      rng.uniform(0.0, kTwoPi)};
    stroke(px, x0, y0, x0 + len * std::cos(phi), y0 + len * std::sin(phi), rate, wobble,
           0.15, rng);
}

/// Track with a single hard scatter: a beam-aligned leg to an interior
/// vertex, then a second leg deflected by 30..90 degrees to either side.
void draw_kink(Eigen::MatrixXd& px, Rng& rng) {
    const double x0 = rng.uniform(2.0, 4.0);
    const double y0 = rng.uniform(10.0, 20.0);
    const double phi1 = 0.15 * rng.uniform(-1.0, 1.0);
    const double l1 = rng.uniform(8.0, 13.0);
    const double jx = x0 + l1 * std::cos(phi1);
    const double jy = y0 + l1 * std::sin(phi1);
    const double bend = rng.uniform(std::numbers::pi / 6.0, std::numbers::pi / 2.0);
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    const double phi2 = phi1 + sign * bend;
    const double l2 = rng.uniform(8.0, 13.0);
    WobbleSpec w1{0.25, rng.uniform(10.0, 18.0), rng.uniform(0.0, kTwoPi)};
    stroke(px, x0, y0, jx, jy, 1.0, w1, 0.15, rng);
    WobbleSpec w2{0.25, rng.uniform(10.0, 18.0), rng.uniform(0.0, kTwoPi)};
    stroke(px, jx, jy, jx + l2 * std::cos(phi2), jy + l2 * std::sin(phi2), 1.0, w2, 0.15,
           rng);
}

/// Electromagnetic-style shower: a cone of branching segments whose deposit
/// rate decays with generation, processed in breadth-first order so the draw
/// sequence is deterministic.
void draw_shower(Eigen::MatrixXd& px, Rng& rng) {
    struct Segment {
        double x, y, phi, intensity;
        int depth;
    };
    const double ax = rng.uniform(2.0, 5.0);
    const double ay = rng.uniform(10.0, 20.0);
    const double axis = 0.2 * rng.uniform(-1.0, 1.0);
    std::deque<Segment> queue;
    queue.push_back({ax, ay, axis, 1.15, 0});
    while (!queue.empty()) {
        const Segment seg = queue.front();
        queue.pop_front();
        const double len = rng.uniform(3.5, 6.5);
        const double ex = seg.x + len * std::cos(seg.phi);
        const double ey = seg.y + len * std::sin(seg.phi);
        WobbleSpec wobble{0.2, rng.uniform(6.0, 12.0), rng.uniform(0.0, kTwoPi)};
        stroke(px, seg.x, seg.y, ex, ey, seg.intensity, wobble, 0.25, rng);
        if (seg.depth < 3) {
            const double spread1 = rng.uniform(0.12, 0.45);
            const double spread2 = rng.uniform(0.12, 0.45);
            queue.push_back({ex, ey, seg.phi - spread1, seg.intensity * 0.7, seg.depth + 1});
            queue.push_back({ex, ey, seg.phi + spread2, seg.intensity * 0.7, seg.depth + 1});
        }
    }
}

void draw_event(Eigen::MatrixXd& px, ParticleKind kind, Rng& rng) {
    switch (kind) {
        case ParticleKind::track:
            draw_track(px, rng, 1.0, 0.3, 0.18, 10.0, 18.0);
            break;
        case ParticleKind::heavy_track:
            draw_track(px, rng, 2.3, 0.15, 0.08, 18.0, 26.0);
            break;
        case ParticleKind::kink:
            draw_kink(px, rng);
            break;
        case ParticleKind::shower:
            draw_shower(px, rng);
            break;
    }
}

/// i.i.d. nonnegative uniform noise on every canvas pixel (row-major draw
/// order), then quantization of the final value through float32 so that the
/// in-memory doubles match the on-disk precision exactly.
void add_noise_and_quantize(Eigen::MatrixXd& px, double noise_level, Rng& rng) {
    for (int r = 0; r < kCanvas; ++r) {
        for (int c = 0; c < kCanvas; ++c) {
            const double v = px(r, c) + noise_level * rng.uniform();
            px(r, c) = static_cast<double>(static_cast<float>(v));
        }
    }
}

LabeledImage make_sample(ParticleKind kind, int label, double noise_level, Rng& rng,
                         int pad_size) {
    LabeledImage image;
    image.pixels = Eigen::MatrixXd::Zero(kCanvas, kCanvas);
    image.label = label;
    draw_event(image.pixels, kind, rng);
    add_noise_and_quantize(image.pixels, noise_level, rng);
    return pad_to(image, pad_size);
}

Dataset make_split(const GeneratorConfig& config, int count, Dataset::Split split,
                   Rng& rng) {
    Dataset ds;
    ds.split = split;
    ds.class_names = {to_string(config.class_a), to_string(config.class_b)};
    ds.images.reserve(count);
    const int count_a = (count + 1) / 2;
    int drawn_a = 0;
    for (int i = 0; i < count; ++i) {
        const bool pick_a = (i % 2 == 0 && drawn_a < count_a) || (i - drawn_a >= count - count_a);
        const ParticleKind kind = pick_a ? config.class_a : config.class_b;
        ds.images.push_back(make_sample(kind, pick_a ? 0 : 1, config.noise_level, rng, 32));
        drawn_a += pick_a ? 1 : 0;
    }
    return ds;
}

} // namespace

const char* to_string(ParticleKind kind) {
    switch (kind) {
        case ParticleKind::track: return "track";
        case ParticleKind::shower: return "shower";
        case ParticleKind::kink: return "kink";
        case ParticleKind::heavy_track: return "heavy_track";
    }
    return "unknown";
}

ParticleKind particle_kind_from_string(const std::string& name) {
    if (name == "track") return ParticleKind::track;
    if (name == "shower") return ParticleKind::shower;
    if (name == "kink") return ParticleKind::kink;
    if (name == "heavy_track") return ParticleKind::heavy_track;
    throw ConfigError("unknown particle class \"" + name +
                      "\" (expected track, shower, kink, or heavy_track)");
}

std::pair<Dataset, Dataset> generate(const GeneratorConfig& config) {
    if (config.class_a == config.class_b) {
        throw ConfigError("generator classes must differ, both are " +
                          std::string(to_string(config.class_a)));
    }
    if (config.train_count < 1 || config.test_count < 1) {
        throw ConfigError("generator counts must be >= 1, got train=" +
                          std::to_string(config.train_count) + " test=" +
                          std::to_string(config.test_count));
    }
    if (!(config.noise_level >= 0.0)) {
        throw ConfigError("noise_level must be >= 0");
    }
    // Streams 0 and 1 are disjoint: the number of train draws never shifts
    // the test draws, and vice versa.
    Rng train_rng = Rng::substream(config.seed, 0);
    Rng test_rng = Rng::substream(config.seed, 1);
    return {make_split(config, config.train_count, Dataset::Split::train, train_rng),
            make_split(config, config.test_count, Dataset::Split::test, test_rng)};
}

LabeledImage pad_to(const LabeledImage& image, int size) {
    if (image.pixels.rows() > size || image.pixels.cols() > size) {
        throw UsageError("pad_to target " + std::to_string(size) +
                         " is smaller than the image (" +
                         std::to_string(image.pixels.rows()) + "x" +
                         std::to_string(image.pixels.cols()) + ")");
    }
    LabeledImage out;
    out.label = image.label;
    out.pixels = Eigen::MatrixXd::Zero(size, size);
    out.pixels.topLeftCorner(image.pixels.rows(), image.pixels.cols()) = image.pixels;
    return out;
}

namespace {

constexpr char kDatasetMagic[4] = {'Q', 'G', 'C', 'D'};
constexpr std::uint32_t kDatasetVersion = 1;

} // namespace

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
    const int h = dataset.height();
    const int w = dataset.width();
    for (const auto& image : dataset.images) {
        if (image.pixels.rows() != h || image.pixels.cols() != w) {
            throw UsageError("cannot save a dataset with mixed image sizes");
        }
        if (image.label != 0 && image.label != 1) {
            throw UsageError("labels must be 0 or 1, got " + std::to_string(image.label));
        }
    }
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) {
        throw IoError("cannot open \"" + path.string() + "\" for writing");
    }
    io::write_bytes(os, kDatasetMagic, 4);
    io::write_u32(os, kDatasetVersion);
    io::write_u32(os, static_cast<std::uint32_t>(dataset.images.size()));
    io::write_u32(os, static_cast<std::uint32_t>(h));
    io::write_u32(os, static_cast<std::uint32_t>(w));
    for (const auto& image : dataset.images) {
        const unsigned char label = static_cast<unsigned char>(image.label);
        io::write_bytes(os, &label, 1);
        for (int r = 0; r < h; ++r) {
            for (int c = 0; c < w; ++c) {
                io::write_f32(os, static_cast<float>(image.pixels(r, c)));
            }
        }
    }
    os.flush();
    if (!os) {
        throw IoError("write to \"" + path.string() + "\" failed");
    }
}

Dataset load_dataset(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw IoError("cannot open \"" + path.string() + "\" for reading");
    }
    std::uint64_t offset = 0;
    io::expect_magic(is, kDatasetMagic, offset);
    const std::uint32_t version = io::read_u32(is, offset, "version");
    if (version != kDatasetVersion) {
        throw FormatError("unsupported dataset version " + std::to_string(version) +
                          " at offset 4 (expected " + std::to_string(kDatasetVersion) + ")");
    }
    const std::uint32_t count = io::read_u32(is, offset, "sample count");
    const std::uint32_t h = io::read_u32(is, offset, "height");
    const std::uint32_t w = io::read_u32(is, offset, "width");
    // Empty datasets are valid files; the dimension header is meaningful only
    // when at least one sample follows.
    if (count > 0 && (h == 0 || w == 0 || static_cast<std::uint64_t>(h) * w > (1u << 22))) {
        throw FormatError("implausible image dimensions " + std::to_string(h) + "x" +
                          std::to_string(w) + " at offset 12");
    }
    Dataset ds;
    ds.images.reserve(count);
    for (std::uint32_t s = 0; s < count; ++s) {
        const std::uint64_t label_offset = offset;
        LabeledImage image;
        const std::uint8_t label = io::read_u8(is, offset, "label");
        if (label > 1) {
            throw FormatError("label " + std::to_string(label) + " at offset " +
                              std::to_string(label_offset) + " is not binary");
        }
        image.label = label;
        image.pixels.resize(h, w);
        for (std::uint32_t r = 0; r < h; ++r) {
            for (std::uint32_t c = 0; c < w; ++c) {
                const std::uint64_t pixel_offset = offset;
                const float v = io::read_f32(is, offset, "pixel");
                if (!std::isfinite(v) || v < 0.0f) {
                    throw FormatError("invalid pixel value at offset " +
                                      std::to_string(pixel_offset));
                }
                image.pixels(r, c) = static_cast<double>(v);
            }
        }
        ds.images.push_back(std::move(image));
    }
    if (is.peek() != std::char_traits<char>::eof()) {
        throw FormatError("trailing bytes after the last sample at offset " +
                          std::to_string(offset));
    }
    return ds;
}

std::array<ClassStats, 2> summarize(const Dataset& dataset) {
    std::array<ClassStats, 2> stats{};
    std::array<std::int64_t, 2> pixels{};
    std::array<std::int64_t, 2> nonzero{};
    std::array<double, 2> sum{};
    for (const auto& image : dataset.images) {
        const int k = image.label;
        stats[k].count += 1;
        pixels[k] += image.pixels.size();
        sum[k] += image.pixels.sum();
        nonzero[k] += (image.pixels.array() > 0.0).count();
        stats[k].max_intensity = std::max(stats[k].max_intensity, image.pixels.maxCoeff());
    }
    for (int k = 0; k < 2; ++k) {
        if (pixels[k] > 0) {
            stats[k].mean_intensity = sum[k] / static_cast<double>(pixels[k]);
            stats[k].nonzero_fraction =
                static_cast<double>(nonzero[k]) / static_cast<double>(pixels[k]);
        }
    }
    return stats;
}

} // namespace qgcnn
