// SPDX-License-Identifier: Apache-2.0
//
// simd2nn - stacked intelligent metasurface diffractive network simulator
// Copyright (C) 2026 The simd2nn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>

namespace simd2nn {

// Counter-based random streams. Every draw in the pipeline is keyed by a
// tuple (master seed, purpose, counters...) hashed into an independent
// SplitMix64 stream, so results never depend on evaluation order.

inline constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Draw purposes; part of every derived key so streams never overlap.
enum class Purpose : std::uint64_t {
    channel = 1,
    param_init = 2,
    train_subset = 3,
    epoch_shuffle = 4,
    train_noise = 5,
    eval_noise = 6,
    synthesis = 7,
};

inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys) noexcept {
    std::uint64_t h = mix64(master + 0x9e3779b97f4a7c15ULL);
    for (std::uint64_t k : keys) {
        h = mix64(h ^ mix64(k + 0x632be59bd9b4e019ULL));
    }
    return h;
}

inline std::uint64_t derive_seed(std::uint64_t master, Purpose purpose,
                                 std::uint64_t a = 0, std::uint64_t b = 0) noexcept {
    return derive_seed(master, {static_cast<std::uint64_t>(purpose), a, b});
}

/// SplitMix64 engine; satisfies UniformRandomBitGenerator.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t seed) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_);
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Standard normal.
    double normal() { return gauss_(*this); }

    /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
    std::complex<double> complex_normal(double variance = 1.0) {
        const double s = std::sqrt(variance / 2.0);
        const double re = gauss_(*this);
        const double im = gauss_(*this);
        return {s * re, s * im};
    }

private:
    std::uint64_t state_;
    std::normal_distribution<double> gauss_{0.0, 1.0};
};

}  // namespace simd2nn
