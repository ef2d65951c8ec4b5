// Copyright 2026 The QFE Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace qfe {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Seed of the `index`-th child of `parent`. Children of one parent never
/// depend on how many siblings were drawn before them, so per-record work can
/// run in any order or on any number of workers.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) {
    return mix64(parent ^ mix64(index + 0x632BE59BD9B4E019ULL));
}

// Stream tags used with derive_seed to separate independent consumers of one
// record seed.
inline constexpr std::uint64_t kStreamCircuit = 0;
inline constexpr std::uint64_t kStreamTiling = 1;
inline constexpr std::uint64_t kStreamTrajectory = 2;
inline constexpr std::uint64_t kStreamSplit = 3;
inline constexpr std::uint64_t kStreamInit = 4;
inline constexpr std::uint64_t kStreamShuffle = 5;

/// Thin wrapper over mt19937_64 whose derived draws are defined here rather
/// than by the standard library's distributions, which differ between
/// implementations.
class Rng {
   public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). n must be positive.
    std::size_t below(std::size_t n) {
        const std::uint64_t bound = n;
        const std::uint64_t threshold = (0 - bound) % bound;
        while (true) {
            const std::uint64_t r = engine_();
            if (r >= threshold) {
                return static_cast<std::size_t>(r % bound);
            }
        }
    }

    template <typename T>
    void shuffle(std::span<T> items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::swap(items[i - 1], items[below(i)]);
        }
    }

   private:
    std::mt19937_64 engine_;
};

}  // namespace qfe
