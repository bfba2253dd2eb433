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
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "simd2nn/errors.hpp"
#include "simd2nn/geometry.hpp"
#include "simd2nn/types.hpp"

namespace simd2nn {

/// Rayleigh-Sommerfeld field-transfer coefficient between two radiators:
///
///   w = (dx dy cos(chi) / d) * (1 / (2 pi d) - j / lambda) * exp(j 2 pi d / lambda)
inline cplx diffraction_coefficient(double distance, double cos_angle, double pitch_x, double pitch_y,
                                    double wavelength) {
    if (!(distance > 0.0)) throw DomainError("diffraction distance must be positive (atoms coincide)");
    if (!(wavelength > 0.0)) throw DomainError("wavelength must be positive");
    const double amplitude = pitch_x * pitch_y * cos_angle / distance;
    const cplx near_far(1.0 / (2.0 * pi * distance), -1.0 / wavelength);
    return amplitude * near_far * std::polar(1.0, 2.0 * pi * distance / wavelength);
}

/// Fixed M x M transfer from layer `from_layer` to `from_layer + 1`.
/// Row = destination atom, column = source atom, so a hop is W * u.
struct TransmissionMatrix {
    int from_layer = 0;
    std::shared_ptr<const CMatrix> entries;

    const CMatrix& matrix() const { return *entries; }
};

namespace detail {

// Every layer uses the same grid, so the coefficient depends only on the
// (row, col) displacement; tabulate the (2R-1) x (2C-1) distinct values.
inline CMatrix displacement_table(const SimGeometry& g) {
    const int rows = g.rows();
    const int cols = g.cols();
    CMatrix table(2 * rows - 1, 2 * cols - 1);
    const double dz = g.layer_spacing();
    for (int dr = -(rows - 1); dr <= rows - 1; ++dr) {
        for (int dc = -(cols - 1); dc <= cols - 1; ++dc) {
            const double tx = dc * g.atom_pitch_x();
            const double ty = dr * g.atom_pitch_y();
            const double d = std::sqrt(tx * tx + ty * ty + dz * dz);
            table(dr + rows - 1, dc + cols - 1) =
                diffraction_coefficient(d, dz / d, g.atom_pitch_x(), g.atom_pitch_y(), g.wavelength());
        }
    }
    return table;
}

}  // namespace detail

inline TransmissionMatrix build_transmission_matrix(const SimGeometry& geometry, int to_layer) {
    if (to_layer < 1 || to_layer > geometry.num_layers()) {
        throw BoundsError("transmission target layer " + std::to_string(to_layer) + " outside [1, " +
                          std::to_string(geometry.num_layers()) + "]");
    }
    const int rows = geometry.rows();
    const int cols = geometry.cols();
    const int m = geometry.atoms_per_layer();
    const CMatrix table = detail::displacement_table(geometry);
    auto w = std::make_shared<CMatrix>(m, m);
    for (int src = 0; src < m; ++src) {
        const int sr = src / cols;
        const int sc = src % cols;
        for (int dst = 0; dst < m; ++dst) {
            const int dr = dst / cols - sr;
            const int dc = dst % cols - sc;
            (*w)(dst, src) = table(dr + rows - 1, dc + cols - 1);
        }
    }
    return {to_layer - 1, std::move(w)};
}

/// Field transfer from the transmit antenna to every atom of layer 0.
inline CVector build_input_vector(const SimGeometry& geometry) {
    const int m = geometry.atoms_per_layer();
    CVector w0(m);
    for (int i = 0; i < m; ++i) {
        const PairGeometry pg = pair_distance_angle(geometry, SimGeometry::transmit_antenna, 0, i);
        w0(i) = diffraction_coefficient(pg.distance, pg.cos_angle, geometry.atom_pitch_x(), geometry.atom_pitch_y(),
                                        geometry.wavelength());
    }
    return w0;
}

/// The complete fixed optics of one geometry: w0 plus W^1..W^L. With a
/// uniform stack all W^l are identical and share one matrix.
struct Propagation {
    CVector input;
    std::vector<TransmissionMatrix> layers;

    int num_layers() const noexcept { return static_cast<int>(layers.size()); }
    Eigen::Index atoms() const noexcept { return input.size(); }
};

inline Propagation build_propagation(const SimGeometry& geometry) {
    Propagation p;
    p.input = build_input_vector(geometry);
    const TransmissionMatrix first = build_transmission_matrix(geometry, 1);
    for (int l = 1; l <= geometry.num_layers(); ++l) p.layers.push_back({l - 1, first.entries});
    return p;
}

/// Debug dump: one `row col re im` line per entry.
inline void dump_matrix(const TransmissionMatrix& w, std::ostream& out) {
    const CMatrix& m = w.matrix();
    out.precision(17);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            out << r << ' ' << c << ' ' << m(r, c).real() << ' ' << m(r, c).imag() << '\n';
        }
    }
}

}  // namespace simd2nn
