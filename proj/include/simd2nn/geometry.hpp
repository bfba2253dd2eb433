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
#include <optional>
#include <string>

#include "simd2nn/errors.hpp"

namespace simd2nn {

/// User-facing geometry parameters. Unset optionals fall back to the
/// derived defaults: pitch = wavelength / 2, antenna distance = layer spacing.
struct GeometryConfig {
    double wavelength_m = 0.025;
    double t_sim_m = 0.05;
    int layers = 4;
    int atoms_rows = 32;
    int atoms_cols = 64;
    std::optional<double> tx_distance_m;
    std::optional<double> pitch_m;

    /// Square N x N grid from a total atom count; M must be a perfect square.
    static GeometryConfig square(int atoms, int layers = 4) {
        if (atoms <= 0) throw ConfigError("atoms_per_layer must be positive");
        const int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(atoms))));
        if (n * n != atoms) {
            throw ConfigError("atoms_per_layer = " + std::to_string(atoms) + " is not a perfect square");
        }
        GeometryConfig cfg;
        cfg.atoms_rows = n;
        cfg.atoms_cols = n;
        cfg.layers = layers;
        return cfg;
    }
};

struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

/// Distance between two radiators and the cosine of the angle from the layer normal.
struct PairGeometry {
    double distance = 0.0;
    double cos_angle = 0.0;
};

/// Physical layout of the stacked metasurface: L trainable layers plus the
/// input layer 0, every layer an identical rows x cols grid centered on the
/// optical axis. The transmit antenna sits on-axis behind layer 0.
class SimGeometry {
public:
    /// Layer id used for the transmit antenna in pair queries.
    static constexpr int transmit_antenna = -1;

    double wavelength() const noexcept { return wavelength_; }
    int num_layers() const noexcept { return layers_; }
    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }
    int atoms_per_layer() const noexcept { return rows_ * cols_; }
    double sim_thickness() const noexcept { return thickness_; }
    double layer_spacing() const noexcept { return spacing_; }
    double atom_pitch_x() const noexcept { return pitch_x_; }
    double atom_pitch_y() const noexcept { return pitch_y_; }
    double tx_antenna_distance() const noexcept { return tx_distance_; }

    Point3 atom_position(int layer, int index) const {
        if (layer < 0 || layer > layers_) {
            throw BoundsError("layer " + std::to_string(layer) + " outside [0, " + std::to_string(layers_) + "]");
        }
        if (index < 0 || index >= atoms_per_layer()) {
            throw BoundsError("atom index " + std::to_string(index) + " outside [0, " +
                              std::to_string(atoms_per_layer()) + ")");
        }
        const int row = index / cols_;
        const int col = index % cols_;
        return {(col - (cols_ - 1) / 2.0) * pitch_x_, (row - (rows_ - 1) / 2.0) * pitch_y_, layer * spacing_};
    }

    Point3 antenna_position() const noexcept { return {0.0, 0.0, -tx_distance_}; }

private:
    friend SimGeometry build_geometry(const GeometryConfig& config);

    double wavelength_ = 0.0;
    int layers_ = 0;
    int rows_ = 0;
    int cols_ = 0;
    double thickness_ = 0.0;
    double spacing_ = 0.0;
    double pitch_x_ = 0.0;
    double pitch_y_ = 0.0;
    double tx_distance_ = 0.0;
};

inline SimGeometry build_geometry(const GeometryConfig& config) {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(name) + " must be positive and finite");
    };
    positive(config.wavelength_m, "lambda_m");
    positive(config.t_sim_m, "t_sim_m");
    if (config.layers < 1) throw ConfigError("layers must be >= 1");
    if (config.atoms_rows < 1 || config.atoms_cols < 1) throw ConfigError("atoms_rows and atoms_cols must be >= 1");

    SimGeometry g;
    g.wavelength_ = config.wavelength_m;
    g.layers_ = config.layers;
    g.rows_ = config.atoms_rows;
    g.cols_ = config.atoms_cols;
    g.thickness_ = config.t_sim_m;
    g.spacing_ = config.t_sim_m / config.layers;
    const double pitch = config.pitch_m.value_or(config.wavelength_m / 2.0);
    positive(pitch, "pitch_m");
    g.pitch_x_ = pitch;
    g.pitch_y_ = pitch;
    g.tx_distance_ = config.tx_distance_m.value_or(g.spacing_);
    positive(g.tx_distance_, "tx_distance_m");
    return g;
}

/// Distance and propagation-angle cosine from atom `from_index` on
/// `from_layer` to atom `to_index` on the next layer. With
/// from_layer == SimGeometry::transmit_antenna the source is the antenna
/// (from_index must be 0) and the destination is on layer 0.
inline PairGeometry pair_distance_angle(const SimGeometry& geometry, int from_layer, int from_index, int to_index) {
    Point3 from;
    Point3 to;
    if (from_layer == SimGeometry::transmit_antenna) {
        if (from_index != 0) throw BoundsError("transmit antenna has a single element (index 0)");
        from = geometry.antenna_position();
        to = geometry.atom_position(0, to_index);
    } else {
        if (from_layer < 0 || from_layer >= geometry.num_layers()) {
            throw BoundsError("source layer " + std::to_string(from_layer) + " has no successor");
        }
        from = geometry.atom_position(from_layer, from_index);
        to = geometry.atom_position(from_layer + 1, to_index);
    }
    const double dx = to.x - from.x;
    const double dy = to.y - from.y;
    const double dz = to.z - from.z;
    const double distance = std::sqrt(dx * dx + dy * dy + dz * dz);
    return {distance, dz / distance};
}

}  // namespace simd2nn
