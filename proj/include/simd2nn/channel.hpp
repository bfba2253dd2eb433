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
#include <cstdint>
#include <string>

#include "simd2nn/errors.hpp"
#include "simd2nn/random.hpp"
#include "simd2nn/types.hpp"

namespace simd2nn {

/// SIM-to-ground link parameters.
///
/// Powers are in dBm and converted to linear amplitudes with a shared
/// reference (see dbm_to_amplitude). The classifier and the loss only depend
/// on relative powers, so the reference only needs to be common.
struct ChannelConfig {
    double carrier_freq_hz = 12e9;
    double distance_m = 1000.0;
    double rician_k_db = 20.0;
    double atmospheric_loss_db = 0.0;
    double environment_loss_db = 0.0;
    double noise_power_dbm = -104.0;
    double tx_power_dbm = 20.0;
    int num_rx_antennas = 2;
    std::uint64_t seed = 7;
};

struct ChannelRealization {
    CMatrix h_matrix;  // K x M, path-loss amplitude included
    double noise_sigma = 0.0;
};

inline void validate(const ChannelConfig& cfg) {
    if (!(cfg.carrier_freq_hz > 0.0)) throw ConfigError("freq_hz must be positive");
    if (!(cfg.distance_m > 0.0)) throw ConfigError("link_distance_m must be positive");
    if (!std::isfinite(cfg.rician_k_db)) throw ConfigError("rician_k_db must be finite");
    if (!std::isfinite(cfg.atmospheric_loss_db) || !std::isfinite(cfg.environment_loss_db)) {
        throw ConfigError("la_db and le_db must be finite");
    }
    if (!std::isfinite(cfg.noise_power_dbm) || !std::isfinite(cfg.tx_power_dbm)) {
        throw ConfigError("noise_dbm and tx_power_dbm must be finite");
    }
    if (cfg.num_rx_antennas < 2) throw ConfigError("rx_antennas must be >= 2");
}

/// Free-space path loss in dB, base-10 logarithms, f in Hz and d in meters.
inline double fspl_db(double distance_m, double freq_hz) {
    if (!(distance_m > 0.0) || !(freq_hz > 0.0)) throw DomainError("FSPL needs positive distance and frequency");
    return 20.0 * std::log10(freq_hz) + 20.0 * std::log10(distance_m) - 147.55;
}

/// FSPL plus atmospheric (LA) and environment (LE) losses.
inline double path_loss_db(const ChannelConfig& cfg) {
    return fspl_db(cfg.distance_m, cfg.carrier_freq_hz) + cfg.atmospheric_loss_db + cfg.environment_loss_db;
}

/// Watt-referenced amplitude: 10^((dBm - 30) / 20). Used for both P_t and sigma^2.
inline double dbm_to_amplitude(double dbm) { return std::pow(10.0, (dbm - 30.0) / 20.0); }

inline double linear_k_factor(double k_db) { return std::pow(10.0, k_db / 10.0); }

/// Unit-mean-power Rician matrix: sqrt(k/(k+1)) * ones + sqrt(1/(k+1)) * CN(0, 1).
inline CMatrix sample_small_scale(double rician_k_db, int rows, int cols, CounterRng& rng) {
    const double kappa = linear_k_factor(rician_k_db);
    const double los = std::sqrt(kappa / (kappa + 1.0));
    const double nlos = std::sqrt(1.0 / (kappa + 1.0));
    CMatrix h(rows, cols);
    // Column-major fill order is part of the determinism contract.
    for (int c = 0; c < cols; ++c) {
        for (int r = 0; r < rows; ++r) h(r, c) = los + nlos * rng.complex_normal(1.0);
    }
    return h;
}

inline ChannelRealization sample_rician(const ChannelConfig& cfg, int atoms, CounterRng& rng) {
    validate(cfg);
    if (atoms < 1) throw ShapeError("channel needs at least one transmitting atom");
    ChannelRealization out;
    const double alpha = std::pow(10.0, -path_loss_db(cfg) / 20.0);
    out.h_matrix = alpha * sample_small_scale(cfg.rician_k_db, cfg.num_rx_antennas, atoms, rng);
    out.noise_sigma = dbm_to_amplitude(cfg.noise_power_dbm);
    return out;
}

/// Adds i.i.d. CN(0, sigma^2) to every component.
inline CVector add_awgn(const CVector& signal, double noise_sigma, CounterRng& rng) {
    if (noise_sigma < 0.0) throw DomainError("noise sigma must be non-negative");
    CVector out = signal;
    if (noise_sigma == 0.0) return out;
    const double variance = noise_sigma * noise_sigma;
    for (Eigen::Index k = 0; k < out.size(); ++k) out(k) += rng.complex_normal(variance);
    return out;
}

}  // namespace simd2nn
