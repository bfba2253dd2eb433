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
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "simd2nn/binary_io.hpp"
#include "simd2nn/channel.hpp"
#include "simd2nn/errors.hpp"
#include "simd2nn/propagation.hpp"
#include "simd2nn/random.hpp"
#include "simd2nn/types.hpp"

namespace simd2nn {

enum class ModelKind : std::uint8_t { sim = 0, digital = 1 };

inline const char* to_string(ModelKind kind) { return kind == ModelKind::sim ? "sim" : "digital"; }

/// Phase-only metasurface weights: theta(l - 1, m) is the phase of atom m on
/// trainable layer l. The layer response exp(j theta) is unit-modulus by
/// construction.
struct PhaseParams {
    RMatrix theta;  // L x M, radians

    static constexpr ModelKind kind = ModelKind::sim;
    using Gradient = RMatrix;

    int layers() const noexcept { return static_cast<int>(theta.rows()); }
    Eigen::Index atoms() const noexcept { return theta.cols(); }

    CVector response(int layer) const {
        CVector r(theta.cols());
        for (Eigen::Index m = 0; m < theta.cols(); ++m) r(m) = std::polar(1.0, theta(layer, m));
        return r;
    }

    std::span<double> values() noexcept { return {theta.data(), static_cast<std::size_t>(theta.size())}; }
    std::span<const double> values() const noexcept {
        return {theta.data(), static_cast<std::size_t>(theta.size())};
    }
};

/// Digital baseline: the same diagonal layers with unconstrained complex weights.
struct DigitalParams {
    CMatrix weights;  // L x M

    static constexpr ModelKind kind = ModelKind::digital;
    // Stored as complex (d/dRe, d/dIm) pairs.
    using Gradient = CMatrix;

    int layers() const noexcept { return static_cast<int>(weights.rows()); }
    Eigen::Index atoms() const noexcept { return weights.cols(); }

    CVector response(int layer) const { return weights.row(layer).transpose(); }

    // Complex storage is layout-compatible with interleaved (re, im) doubles.
    std::span<double> values() noexcept {
        return {reinterpret_cast<double*>(weights.data()), 2 * static_cast<std::size_t>(weights.size())};
    }
    std::span<const double> values() const noexcept {
        return {reinterpret_cast<const double*>(weights.data()), 2 * static_cast<std::size_t>(weights.size())};
    }
};

using AnyParams = std::variant<PhaseParams, DigitalParams>;

/// Diagonal of the input layer: the augmented, normalized features.
struct EncodedInput {
    CVector phi0;
};

inline EncodedInput encode_input(const CVector& features, Eigen::Index atoms) {
    if (features.size() != atoms) {
        throw ShapeError("feature length " + std::to_string(features.size()) + " != atoms per layer " +
                         std::to_string(atoms));
    }
    for (Eigen::Index m = 0; m < features.size(); ++m) {
        if (!(std::abs(features(m)) <= 1.0 + 1e-9)) {
            throw EncodingError("feature " + std::to_string(m) + " has modulus " + std::to_string(std::abs(features(m))) +
                                " > 1");
        }
    }
    return {features};
}

/// Intermediate wavefields of one forward pass.
struct ForwardCache {
    std::vector<CVector> fields;     // u^0 .. u^L
    std::vector<CVector> incident;   // W^l u^{l-1} for l = 1..L (index l - 1)
    CVector z;                       // H u^L
    CVector y;                       // z + n
};

/// y = H diag(r^L) W^L ... diag(r^1) W^1 diag(s) w0 * tx_amplitude + n, with x_t = 1.
/// `noise` == nullptr disables the additive noise term.
template <class Params>
ForwardCache forward(const Params& params, const EncodedInput& input, const Propagation& optics,
                     const ChannelRealization& channel, double tx_amplitude, CounterRng* noise) {
    const Eigen::Index m = optics.atoms();
    if (input.phi0.size() != m) throw ShapeError("encoded input does not match the metasurface size");
    if (params.layers() != optics.num_layers() || params.atoms() != m) {
        throw ShapeError("parameters are " + std::to_string(params.layers()) + "x" + std::to_string(params.atoms()) +
                         ", optics are " + std::to_string(optics.num_layers()) + "x" + std::to_string(m));
    }
    if (channel.h_matrix.cols() != m) throw ShapeError("channel matrix width does not match the metasurface size");

    ForwardCache cache;
    cache.fields.reserve(params.layers() + 1);
    cache.incident.reserve(params.layers());
    cache.fields.push_back((input.phi0.array() * optics.input.array() * tx_amplitude).matrix());
    for (int l = 0; l < params.layers(); ++l) {
        cache.incident.push_back(optics.layers[l].matrix() * cache.fields.back());
        cache.fields.push_back((params.response(l).array() * cache.incident.back().array()).matrix());
    }
    cache.z = channel.h_matrix * cache.fields.back();
    cache.y = noise ? add_awgn(cache.z, channel.noise_sigma, *noise) : cache.z;
    return cache;
}

inline ForwardCache forward(const AnyParams& params, const EncodedInput& input, const Propagation& optics,
                            const ChannelRealization& channel, double tx_amplitude, CounterRng* noise) {
    return std::visit([&](const auto& p) { return forward(p, input, optics, channel, tx_amplitude, noise); }, params);
}

/// Index of the antenna with the largest |y_k|^2; ties go to the lowest index.
inline std::size_t classify(const CVector& y) {
    if (y.size() == 0) throw ShapeError("cannot classify an empty output vector");
    std::size_t best = 0;
    double best_power = std::norm(y(0));
    for (Eigen::Index k = 1; k < y.size(); ++k) {
        const double p = std::norm(y(k));
        if (p > best_power) {
            best_power = p;
            best = static_cast<std::size_t>(k);
        }
    }
    return best;
}

/// theta ~ U[0, 2 pi) i.i.d.; the digital model starts from exp(j theta) of
/// the same draw, so both begin at the same SIM-feasible point.
inline PhaseParams init_phase_params(int layers, Eigen::Index atoms, CounterRng& rng) {
    PhaseParams p{RMatrix(layers, atoms)};
    for (int l = 0; l < layers; ++l) {
        for (Eigen::Index m = 0; m < atoms; ++m) p.theta(l, m) = 2.0 * pi * rng.uniform();
    }
    return p;
}

inline DigitalParams init_digital_params(int layers, Eigen::Index atoms, CounterRng& rng) {
    const PhaseParams phases = init_phase_params(layers, atoms, rng);
    DigitalParams d{CMatrix(layers, atoms)};
    for (int l = 0; l < layers; ++l) {
        for (Eigen::Index m = 0; m < atoms; ++m) d.weights(l, m) = std::polar(1.0, phases.theta(l, m));
    }
    return d;
}

inline AnyParams init_params(ModelKind kind, int layers, Eigen::Index atoms, CounterRng& rng) {
    if (kind == ModelKind::sim) return init_phase_params(layers, atoms, rng);
    return init_digital_params(layers, atoms, rng);
}

// SIMTH1 parameter file: magic, u32 L, u32 M, u8 kind, then L*M f64 (theta)
// or 2*L*M f64 (re/im interleaved), all little-endian, row-major by layer.

inline void save_params(const std::filesystem::path& path, const AnyParams& params) {
    io::ByteWriter w;
    w.magic("SIMTH1");
    std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            w.u32(static_cast<std::uint32_t>(p.layers()));
            w.u32(static_cast<std::uint32_t>(p.atoms()));
            w.u8(static_cast<std::uint8_t>(P::kind));
            for (int l = 0; l < p.layers(); ++l) {
                for (Eigen::Index m = 0; m < p.atoms(); ++m) {
                    if constexpr (P::kind == ModelKind::sim) {
                        w.f64(p.theta(l, m));
                    } else {
                        w.f64(p.weights(l, m).real());
                        w.f64(p.weights(l, m).imag());
                    }
                }
            }
        },
        params);
    w.save(path);
}

inline AnyParams load_params(const std::filesystem::path& path) {
    auto r = io::ByteReader::from_file(path);
    r.expect_magic("SIMTH1");
    const std::uint32_t layers = r.u32();
    const std::uint32_t atoms = r.u32();
    const std::uint64_t kind_offset = r.offset();
    const std::uint8_t kind = r.u8();
    if (kind == 0) {
        PhaseParams p{RMatrix(layers, atoms)};
        for (std::uint32_t l = 0; l < layers; ++l) {
            for (std::uint32_t m = 0; m < atoms; ++m) p.theta(l, m) = r.f64();
        }
        r.expect_end();
        return p;
    }
    if (kind == 1) {
        DigitalParams d{CMatrix(layers, atoms)};
        for (std::uint32_t l = 0; l < layers; ++l) {
            for (std::uint32_t m = 0; m < atoms; ++m) {
                const double re = r.f64();
                const double im = r.f64();
                d.weights(l, m) = {re, im};
            }
        }
        r.expect_end();
        return d;
    }
    throw FormatError("unknown model kind " + std::to_string(kind), kind_offset);
}

}  // namespace simd2nn
