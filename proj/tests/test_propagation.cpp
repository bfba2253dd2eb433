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
#include <catch_amalgamated.hpp>

#include <sstream>

#include "oracles.hpp"
#include "simd2nn/propagation.hpp"

using namespace simd2nn;
using Catch::Approx;

namespace {

SimGeometry grid(int rows, int cols, int layers = 4, double wavelength = 0.025) {
    GeometryConfig cfg;
    cfg.atoms_rows = rows;
    cfg.atoms_cols = cols;
    cfg.layers = layers;
    cfg.wavelength_m = wavelength;
    return build_geometry(cfg);
}

}  // namespace

TEST_CASE("axial coefficient by hand") {
    // 0.0125 * (12.7324 - 40j) * e^{j pi}
    const cplx w = diffraction_coefficient(0.0125, 1.0, 0.0125, 0.0125, 0.025);
    CHECK(w.real() == Approx(-0.1591549).margin(1e-6));
    CHECK(w.imag() == Approx(0.5).margin(1e-6));
    const cplx o = oracle::rs_coefficient(0.0125, 1.0, 0.0125, 0.0125, 0.025);
    CHECK(std::abs(w - o) < 1e-14);
}

TEST_CASE("coefficient edge cases") {
    CHECK(diffraction_coefficient(0.02, 0.0, 0.0125, 0.0125, 0.025) == cplx(0.0, 0.0));
    CHECK_THROWS_AS(diffraction_coefficient(0.0, 1.0, 0.0125, 0.0125, 0.025), DomainError);
    CHECK_THROWS_AS(diffraction_coefficient(-1.0, 1.0, 0.0125, 0.0125, 0.025), DomainError);
    CHECK_THROWS_AS(diffraction_coefficient(1.0, 1.0, 0.0125, 0.0125, 0.0), DomainError);
    // Adding a whole wavelength to the exponent only: modulus fixed by the prefactor.
    const double d = 0.0125;
    const cplx a = diffraction_coefficient(d, 1.0, 0.0125, 0.0125, 0.025);
    const cplx pre = (0.0125 * 0.0125 / d) * cplx(1.0 / (2.0 * pi * d), -1.0 / 0.025);
    CHECK(std::abs(a) == Approx(std::abs(pre)).epsilon(1e-14));
}

TEST_CASE("coefficient matches the independent formula on random inputs") {
    CounterRng rng(11);
    for (int i = 0; i < 500; ++i) {
        const double d = 1e-3 + rng.uniform();
        const double c = rng.uniform();
        const double px = 1e-3 + 0.02 * rng.uniform();
        const double py = 1e-3 + 0.02 * rng.uniform();
        const double lam = 1e-3 + 0.05 * rng.uniform();
        const cplx w = diffraction_coefficient(d, c, px, py, lam);
        const cplx o = oracle::rs_coefficient(d, c, px, py, lam);
        CHECK(std::abs(w - o) <= 1e-12 * std::max(1.0, std::abs(o)));
    }
}

TEST_CASE("axial modulus decays with distance") {
    double prev = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= 200; ++i) {
        const double mod = std::abs(diffraction_coefficient(0.001 * i, 1.0, 0.0125, 0.0125, 0.025));
        CHECK(mod < prev);
        prev = mod;
    }
}

TEST_CASE("single-atom matrix and input vector") {
    const SimGeometry g = grid(1, 1);
    const cplx axial = diffraction_coefficient(0.0125, 1.0, 0.0125, 0.0125, 0.025);
    const TransmissionMatrix w = build_transmission_matrix(g, 1);
    REQUIRE(w.matrix().rows() == 1);
    CHECK(std::abs(w.matrix()(0, 0) - axial) < 1e-15);
    const CVector w0 = build_input_vector(g);
    CHECK(std::abs(w0(0) - axial) < 1e-15);
}

TEST_CASE("2x2 grid: symmetric matrix, equal diagonal, equal input entries") {
    const SimGeometry g = grid(2, 2);
    const TransmissionMatrix tm = build_transmission_matrix(g, 1);
    const CMatrix& w = tm.matrix();
    CHECK((w - w.transpose()).cwiseAbs().maxCoeff() == 0.0);
    for (int i = 1; i < 4; ++i) CHECK(w(i, i) == w(0, 0));
    CHECK((w - w.adjoint()).cwiseAbs().maxCoeff() > 0.0);  // symmetric, not Hermitian
    const CVector w0 = build_input_vector(g);
    for (int i = 1; i < 4; ++i) CHECK(std::abs(w0(i) - w0(0)) < 1e-15);
}

TEST_CASE("matrix entries equal the pairwise oracle") {
    for (auto [rows, cols] : {std::pair{3, 3}, std::pair{2, 5}, std::pair{4, 1}}) {
        const SimGeometry g = grid(rows, cols, 3, 0.02);
        const TransmissionMatrix tm = build_transmission_matrix(g, 2);
        const CMatrix& w = tm.matrix();
        const oracle::Dense ref = oracle::transfer(rows, cols, 0.02, g.layer_spacing());
        for (int r = 0; r < g.atoms_per_layer(); ++r) {
            for (int c = 0; c < g.atoms_per_layer(); ++c) {
                CHECK(std::abs(w(r, c) - ref[r][c]) <= 1e-12 * std::abs(ref[r][c]));
                const PairGeometry pg = pair_distance_angle(g, 1, c, r);
                const cplx direct = diffraction_coefficient(pg.distance, pg.cos_angle, g.atom_pitch_x(),
                                                            g.atom_pitch_y(), g.wavelength());
                CHECK(std::abs(w(r, c) - direct) <= 1e-13 * std::abs(direct));
            }
        }
        const CVector w0 = build_input_vector(g);
        const auto w0_ref = oracle::input_vector(rows, cols, 0.02, g.layer_spacing(), g.tx_antenna_distance());
        for (int i = 0; i < g.atoms_per_layer(); ++i) CHECK(std::abs(w0(i) - w0_ref[i]) <= 1e-12 * std::abs(w0_ref[i]));
    }
}

TEST_CASE("uniform stack reuses one matrix and rejects bad layers") {
    const SimGeometry g = grid(3, 4, 4);
    const Propagation p = build_propagation(g);
    REQUIRE(p.num_layers() == 4);
    for (int l = 0; l < 4; ++l) {
        CHECK(p.layers[l].from_layer == l);
        CHECK(p.layers[l].entries == p.layers[0].entries);
    }
    CHECK(build_transmission_matrix(g, 4).matrix() == p.layers[0].matrix());
    CHECK(p.layers[0].matrix().allFinite());
    CHECK_THROWS_AS(build_transmission_matrix(g, 0), BoundsError);
    CHECK_THROWS_AS(build_transmission_matrix(g, 5), BoundsError);
}

TEST_CASE("matrix dump lists every entry") {
    const SimGeometry g = grid(2, 2);
    std::ostringstream out;
    dump_matrix(build_transmission_matrix(g, 1), out);
    std::istringstream in(out.str());
    int lines = 0;
    int r = 0, c = 0;
    double re = 0.0, im = 0.0;
    const TransmissionMatrix tm = build_transmission_matrix(g, 1);
    const CMatrix& w = tm.matrix();
    while (in >> r >> c >> re >> im) {
        CHECK(re == w(r, c).real());
        CHECK(im == w(r, c).imag());
        ++lines;
    }
    CHECK(lines == 16);
}
