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

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "simd2nn/binary_io.hpp"
#include "simd2nn/errors.hpp"
#include "simd2nn/random.hpp"
#include "simd2nn/types.hpp"

namespace simd2nn {

using iq_sample = std::complex<float>;

inline constexpr std::uint8_t ocean = 0;
inline constexpr std::uint8_t land = 1;

/// Raw complex IQ scene, row-major, with an optional per-pixel class mask.
struct IqScene {
    int height = 0;
    int width = 0;
    std::vector<iq_sample> samples;
    std::optional<std::vector<std::uint8_t>> label_mask;

    const iq_sample& at(int row, int col) const { return samples[static_cast<std::size_t>(row) * width + col]; }
};

/// One square window of a scene.
struct IqPatch {
    int side = 0;
    int origin_row = 0;
    int origin_col = 0;
    std::uint8_t label = 0;
    std::vector<iq_sample> samples;  // side x side, row-major

    bool operator==(const IqPatch&) const = default;
};

struct Dataset {
    int side = 0;
    std::vector<IqPatch> patches;

    bool operator==(const Dataset&) const = default;
};

struct PatchExtraction {
    Dataset dataset;
    int grid_rows = 0;
    int grid_cols = 0;
    /// Set when the window never fits inside the scene.
    bool window_too_large = false;
};

/// Majority vote of the mask under the window; ties go to the lowest class.
inline std::uint8_t label_patch(const IqScene& scene, int origin_row, int origin_col, int side) {
    if (!scene.label_mask) throw LabelingError("scene has no label mask");
    const auto& mask = *scene.label_mask;
    std::vector<std::size_t> counts(256, 0);
    for (int r = origin_row; r < origin_row + side; ++r) {
        for (int c = origin_col; c < origin_col + side; ++c) ++counts[mask[static_cast<std::size_t>(r) * scene.width + c]];
    }
    return static_cast<std::uint8_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

/// Sliding windows at (r * stride, c * stride) that fit entirely inside the
/// scene, in row-major order. Labels come from the mask when present.
inline PatchExtraction extract_patches(const IqScene& scene, int side = 128, int stride = 32) {
    if (side < 1 || stride < 1) throw ConfigError("patch side and stride must be positive");
    PatchExtraction out;
    out.dataset.side = side;
    if (side > scene.height || side > scene.width) {
        out.window_too_large = true;
        return out;
    }
    out.grid_rows = (scene.height - side) / stride + 1;
    out.grid_cols = (scene.width - side) / stride + 1;
    out.dataset.patches.reserve(static_cast<std::size_t>(out.grid_rows) * out.grid_cols);
    for (int gr = 0; gr < out.grid_rows; ++gr) {
        for (int gc = 0; gc < out.grid_cols; ++gc) {
            IqPatch p;
            p.side = side;
            p.origin_row = gr * stride;
            p.origin_col = gc * stride;
            p.samples.reserve(static_cast<std::size_t>(side) * side);
            for (int r = 0; r < side; ++r) {
                const iq_sample* row = &scene.samples[static_cast<std::size_t>(p.origin_row + r) * scene.width];
                p.samples.insert(p.samples.end(), row + p.origin_col, row + p.origin_col + side);
            }
            if (scene.label_mask) p.label = label_patch(scene, p.origin_row, p.origin_col, side);
            out.dataset.patches.push_back(std::move(p));
        }
    }
    return out;
}

/// Non-overlapping factor x factor complex block means, row-major.
inline CVector downsample(const IqPatch& patch, int factor = 4) {
    if (factor < 1 || patch.side % factor != 0) {
        throw ConfigError("downsample factor " + std::to_string(factor) + " does not divide patch side " +
                          std::to_string(patch.side));
    }
    const int out_side = patch.side / factor;
    CVector out = CVector::Zero(static_cast<Eigen::Index>(out_side) * out_side);
    for (int r = 0; r < patch.side; ++r) {
        for (int c = 0; c < patch.side; ++c) {
            const iq_sample v = patch.samples[static_cast<std::size_t>(r) * patch.side + c];
            out((r / factor) * out_side + c / factor) += cplx(v.real(), v.imag());
        }
    }
    return out / static_cast<double>(factor * factor);
}

/// Scales so the largest modulus is 1; phases are untouched.
inline CVector normalize(const CVector& features) {
    double peak = 0.0;
    for (Eigen::Index i = 0; i < features.size(); ++i) peak = std::max(peak, std::abs(features(i)));
    if (!(peak > 0.0)) throw DegeneratePatchError("all-zero feature vector");
    return features / peak;
}

/// concat(features, exp(j angle) * features); the original half comes first.
inline CVector phase_rotate_augment(const CVector& features, double angle = pi / 2.0) {
    CVector out(2 * features.size());
    out.head(features.size()) = features;
    out.tail(features.size()) = features * std::polar(1.0, angle);
    return out;
}

inline CVector phase_rotate_augment(const CVector& features, Eigen::Index atoms, double angle) {
    if (2 * features.size() != atoms) {
        throw ShapeError("augmented length " + std::to_string(2 * features.size()) + " != atoms per layer " +
                         std::to_string(atoms));
    }
    return phase_rotate_augment(features, angle);
}

/// How a patch becomes the input-layer diagonal.
struct EncodingConfig {
    int downsample = 4;
    bool phase_rotation = true;
    double rotation_angle = pi / 2.0;
};

/// downsample -> normalize -> augment. Without rotation only the first half
/// of the input layer carries data; the unconfigured half keeps the default
/// meta-atom response 1 + 0j and passes the illuminating wave unmodulated.
/// Returns nullopt for degenerate all-zero patches.
inline std::optional<CVector> encode_features(const IqPatch& patch, const EncodingConfig& cfg, Eigen::Index atoms) {
    CVector normalized;
    try {
        normalized = normalize(downsample(patch, cfg.downsample));
    } catch (const DegeneratePatchError&) {
        return std::nullopt;
    }
    if (cfg.phase_rotation) return phase_rotate_augment(normalized, atoms, cfg.rotation_angle);
    if (2 * normalized.size() != atoms) {
        throw ShapeError("feature length " + std::to_string(normalized.size()) + " fills half of " +
                         std::to_string(atoms) + " atoms only when doubled");
    }
    CVector out = CVector::Ones(atoms);
    out.head(normalized.size()) = normalized;
    return out;
}

/// One encoded window of a scene.
struct EncodedWindow {
    CVector features;
    std::uint8_t label = 0;
    int grid_row = 0;
    int grid_col = 0;
};

struct SceneEncoding {
    std::vector<EncodedWindow> windows;
    int grid_rows = 0;
    int grid_cols = 0;
    std::size_t degenerate = 0;
};

/// extract_patches + encode_features without materializing the raw patches.
/// Degenerate windows are counted and skipped.
inline SceneEncoding encode_scene(const IqScene& scene, int side, int stride, const EncodingConfig& cfg,
                                  Eigen::Index atoms) {
    if (side < 1 || stride < 1) throw ConfigError("patch side and stride must be positive");
    SceneEncoding out;
    if (side > scene.height || side > scene.width) return out;
    out.grid_rows = (scene.height - side) / stride + 1;
    out.grid_cols = (scene.width - side) / stride + 1;
    IqPatch p;
    p.side = side;
    p.samples.resize(static_cast<std::size_t>(side) * side);
    for (int gr = 0; gr < out.grid_rows; ++gr) {
        for (int gc = 0; gc < out.grid_cols; ++gc) {
            p.origin_row = gr * stride;
            p.origin_col = gc * stride;
            for (int r = 0; r < side; ++r) {
                const iq_sample* row = &scene.samples[static_cast<std::size_t>(p.origin_row + r) * scene.width];
                std::copy(row + p.origin_col, row + p.origin_col + side, p.samples.begin() + static_cast<std::ptrdiff_t>(r) * side);
            }
            auto features = encode_features(p, cfg, atoms);
            if (!features) {
                ++out.degenerate;
                continue;
            }
            const std::uint8_t label = scene.label_mask ? label_patch(scene, p.origin_row, p.origin_col, side) : 0;
            out.windows.push_back({std::move(*features), label, gr, gc});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Synthetic land/ocean scenes

enum class SceneLayout { half_split, blobs };

/// Ocean is circular Gaussian clutter (per-component std ocean_sigma). Land is
/// clutter with std land_sigma; with texture on, land also carries a coherent
/// component of relative strength texture_strength, and the land pixel is
/// multiplied by a smooth phase ramp exp(j 2 pi (x cos b + y sin b) / period).
struct SynthConfig {
    int height = 1024;
    int width = 1024;
    SceneLayout layout = SceneLayout::half_split;
    double ocean_sigma = 0.3;
    double land_sigma = 1.0;
    bool land_phase_texture = true;
    double texture_period_px = 32.0;
    double texture_angle_rad = 0.5;
    double texture_strength = 1.0;
};

inline IqScene synthesize_scene(const SynthConfig& cfg, CounterRng& rng) {
    if (cfg.height < 1 || cfg.width < 1) throw ConfigError("scene dimensions must be positive");
    if (!(cfg.ocean_sigma > 0.0) || !(cfg.land_sigma > 0.0)) throw ConfigError("scene sigmas must be positive");
    if (cfg.land_phase_texture && !(cfg.texture_period_px > 0.0)) throw ConfigError("texture period must be positive");

    IqScene scene;
    scene.height = cfg.height;
    scene.width = cfg.width;
    const std::size_t n = static_cast<std::size_t>(cfg.height) * cfg.width;
    std::vector<std::uint8_t> mask(n, ocean);

    if (cfg.layout == SceneLayout::half_split) {
        for (int r = 0; r < cfg.height; ++r) {
            for (int c = cfg.width / 2; c < cfg.width; ++c) mask[static_cast<std::size_t>(r) * cfg.width + c] = land;
        }
    } else {
        // Roughly one island per 256 x 256 tile, radius 10-25% of the short side.
        const int islands = std::max(1, (cfg.height * cfg.width) / (256 * 256));
        const double short_side = std::min(cfg.height, cfg.width);
        for (int i = 0; i < islands; ++i) {
            const double cr = rng.uniform() * cfg.height;
            const double cc = rng.uniform() * cfg.width;
            const double radius = short_side * (0.10 + 0.15 * rng.uniform());
            for (int r = 0; r < cfg.height; ++r) {
                for (int c = 0; c < cfg.width; ++c) {
                    if ((r - cr) * (r - cr) + (c - cc) * (c - cc) <= radius * radius) {
                        mask[static_cast<std::size_t>(r) * cfg.width + c] = land;
                    }
                }
            }
        }
    }

    scene.samples.resize(n);
    const double kx = 2.0 * pi * std::cos(cfg.texture_angle_rad) / cfg.texture_period_px;
    const double ky = 2.0 * pi * std::sin(cfg.texture_angle_rad) / cfg.texture_period_px;
    for (int r = 0; r < cfg.height; ++r) {
        for (int c = 0; c < cfg.width; ++c) {
            const std::size_t i = static_cast<std::size_t>(r) * cfg.width + c;
            const double re = rng.normal();
            const double im = rng.normal();
            cplx v;
            if (mask[i] == land) {
                v = cfg.land_sigma * cplx(re, im);
                if (cfg.land_phase_texture) {
                    v = (v + cfg.land_sigma * cfg.texture_strength) * std::polar(1.0, kx * c + ky * r);
                }
            } else {
                v = cfg.ocean_sigma * cplx(re, im);
            }
            scene.samples[i] = iq_sample(static_cast<float>(v.real()), static_cast<float>(v.imag()));
        }
    }
    scene.label_mask = std::move(mask);
    return scene;
}

// ---------------------------------------------------------------------------
// File formats (little-endian)
//
// SIMIQ1: magic, u32 count, u32 side, then per patch u8 label, u32 origin_row,
//         u32 origin_col, side^2 (f32 I, f32 Q) pairs row-major.
// SIMSC1: magic, u32 H, u32 W, H*W (f32 I, f32 Q) pairs, u8 mask flag,
//         then H*W u8 class indices when the flag is 1.

inline void save_dataset(const std::filesystem::path& path, const Dataset& data) {
    io::ByteWriter w;
    w.magic("SIMIQ1");
    w.u32(static_cast<std::uint32_t>(data.patches.size()));
    w.u32(static_cast<std::uint32_t>(data.side));
    for (const IqPatch& p : data.patches) {
        if (p.side != data.side || p.samples.size() != static_cast<std::size_t>(p.side) * p.side) {
            throw ShapeError("patch side does not match the dataset side");
        }
        w.u8(p.label);
        w.u32(static_cast<std::uint32_t>(p.origin_row));
        w.u32(static_cast<std::uint32_t>(p.origin_col));
        for (const iq_sample& s : p.samples) {
            w.f32(s.real());
            w.f32(s.imag());
        }
    }
    w.save(path);
}

inline Dataset load_dataset(const std::filesystem::path& path) {
    auto r = io::ByteReader::from_file(path);
    r.expect_magic("SIMIQ1");
    const std::uint32_t count = r.u32();
    Dataset data;
    data.side = static_cast<int>(r.u32());
    const std::size_t pixels = static_cast<std::size_t>(data.side) * data.side;
    if (count > 0) {
        r.require_records(pixels, 8, "patch samples");
        r.require_records(count, 9 + 8 * pixels, "patches");
    }
    for (std::uint32_t i = 0; i < count; ++i) {
        IqPatch p;
        p.side = data.side;
        p.label = r.u8();
        p.origin_row = static_cast<int>(r.u32());
        p.origin_col = static_cast<int>(r.u32());
        p.samples.resize(pixels);
        for (auto& s : p.samples) {
            const float re = r.f32();
            const float im = r.f32();
            s = {re, im};
        }
        data.patches.push_back(std::move(p));
    }
    r.expect_end();
    return data;
}

inline void save_scene(const std::filesystem::path& path, const IqScene& scene) {
    io::ByteWriter w;
    w.magic("SIMSC1");
    w.u32(static_cast<std::uint32_t>(scene.height));
    w.u32(static_cast<std::uint32_t>(scene.width));
    for (const iq_sample& s : scene.samples) {
        w.f32(s.real());
        w.f32(s.imag());
    }
    w.u8(scene.label_mask ? 1 : 0);
    if (scene.label_mask) {
        for (std::uint8_t v : *scene.label_mask) w.u8(v);
    }
    w.save(path);
}

inline IqScene load_scene(const std::filesystem::path& path) {
    auto r = io::ByteReader::from_file(path);
    r.expect_magic("SIMSC1");
    IqScene scene;
    scene.height = static_cast<int>(r.u32());
    scene.width = static_cast<int>(r.u32());
    const std::size_t n = static_cast<std::size_t>(scene.height) * scene.width;
    r.require_records(n, 8, "scene samples");
    scene.samples.resize(n);
    for (auto& s : scene.samples) {
        const float re = r.f32();
        const float im = r.f32();
        s = {re, im};
    }
    const std::uint64_t flag_offset = r.offset();
    const std::uint8_t flag = r.u8();
    if (flag == 1) {
        std::vector<std::uint8_t> mask(n);
        for (auto& v : mask) v = r.u8();
        scene.label_mask = std::move(mask);
    } else if (flag != 0) {
        throw FormatError("mask flag must be 0 or 1", flag_offset);
    }
    r.expect_end();
    return scene;
}

}  // namespace simd2nn
