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
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "qgcnn/errors.hpp"

namespace qgcnn {

/// One step of the splitmix64 mixer. Used to derive independent stream seeds;
/// never used as the sampling engine itself.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Deterministic random source built on std::mt19937_64, whose output stream
/// is pinned by the C++ standard and therefore identical on every platform.
/// The std::*_distribution adaptors are implementation-defined, so all draws
/// (uniform, normal, integer, shuffle) are derived here by hand.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Independent generator for stream `stream` of a run seeded with `seed`.
    /// Distinct streams (train data, test data, weight init, batch shuffling)
    /// never share draws, so consuming more from one cannot perturb another.
    static Rng substream(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t s = seed ^ (0xA076'1D64'78BD'642FULL * (stream + 1));
        (void)splitmix64(s);
        return Rng(splitmix64(s));
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). Modulo reduction: the bias for the small n
    /// used here (n <= a few thousand) is far below anything observable.
    int uniform_int(int n) {
        if (n <= 0) throw UsageError("uniform_int requires n > 0");
        return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n));
    }

    /// Standard normal draw via the Box-Muller transform. Consumes two
    /// uniforms per pair and caches the second value of the pair.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform(); // (0, 1]; keeps log finite
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    /// In-place Fisher-Yates shuffle with pinned draw order.
    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(uniform_int(static_cast<int>(i)));
            std::swap(items[i - 1], items[j]);
        }
    }

  private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace qgcnn
