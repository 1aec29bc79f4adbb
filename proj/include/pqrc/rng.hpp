// Copyright 2026 The pqrc Authors
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
#include <initializer_list>
#include <random>

namespace pqrc {

/// SplitMix64 finalizer.
[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30U)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27U)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31U);
}

/// Child seed of `master` along a path of indices. Each index is folded in
/// with one SplitMix64 round, so (master, a, b) and (master, b, a) differ.
[[nodiscard]] constexpr std::uint64_t
child_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) noexcept {
    std::uint64_t h = splitmix64(master);
    for (const auto i : path) {
        h = splitmix64(h ^ splitmix64(i + 0x632BE59BD9B4E019ULL));
    }
    return h;
}

/// Seedable 64-bit generator (mt19937_64) with the handful of draws the
/// library needs.
class Rng {
  public:
    using engine_type = std::mt19937_64;

    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }

    /// Generator for stream `index` derived from this generator's seed.
    [[nodiscard]] Rng split(std::uint64_t index) const {
        return Rng(child_seed(seed_, {index}));
    }

    /// Uniform on [0, 1).
    double uniform() { return unit_(engine_); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal() { return normal_(engine_); }
    bool bernoulli(double p) { return uniform() < p; }

    /// Uniform integer in [0, n).
    std::uint64_t index(std::uint64_t n) {
        return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
    }

    engine_type &engine() noexcept { return engine_; }

  private:
    std::uint64_t seed_;
    engine_type engine_;
    std::uniform_real_distribution<double> unit_{0.0, 1.0};
    std::normal_distribution<double> normal_{0.0, 1.0};
};

} // namespace pqrc
