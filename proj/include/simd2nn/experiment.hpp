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
#include <charconv>
#include <cerrno>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "simd2nn/channel.hpp"
#include "simd2nn/data.hpp"
#include "simd2nn/errors.hpp"
#include "simd2nn/geometry.hpp"
#include "simd2nn/metrics.hpp"
#include "simd2nn/network.hpp"
#include "simd2nn/propagation.hpp"
#include "simd2nn/random.hpp"
#include "simd2nn/training.hpp"

namespace simd2nn {

// ---------------------------------------------------------------------------
// Configuration

struct DataConfig {
    std::string scene_path;    // SIMSC1 input
    std::string dataset_path;  // SIMIQ1 input, preferred over the scene
    SynthConfig synth;         // used when neither path is set
    int patch_side = 128;
    int patch_stride = 32;
    EncodingConfig encoding;
};

struct ExperimentConfig {
    GeometryConfig geometry;
    ChannelConfig channel;
    TrainConfig training;
    DataConfig data;
    ModelKind model = ModelKind::sim;
    std::string out_dir = "simd2nn_out";
    std::uint64_t seed = 1;
};

namespace config_detail {

struct ValueError {
    std::string expected;
};

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline long long to_integer(const std::string& v) {
    std::size_t used = 0;
    long long out = 0;
    try {
        out = std::stoll(v, &used);
    } catch (const std::exception&) {
        throw ValueError{"an integer"};
    }
    if (used != v.size()) throw ValueError{"an integer"};
    return out;
}

inline int to_int(const std::string& v) {
    const long long x = to_integer(v);
    if (x < INT32_MIN || x > INT32_MAX) throw ValueError{"a 32-bit integer"};
    return static_cast<int>(x);
}

inline std::uint64_t to_u64(const std::string& v) {
    if (v.empty() || v[0] == '-') throw ValueError{"a non-negative integer"};
    std::size_t used = 0;
    std::uint64_t out = 0;
    try {
        out = std::stoull(v, &used);
    } catch (const std::exception&) {
        throw ValueError{"a non-negative integer"};
    }
    if (used != v.size()) throw ValueError{"a non-negative integer"};
    return out;
}

inline double to_double(const std::string& v) {
    std::size_t used = 0;
    double out = 0.0;
    try {
        out = std::stod(v, &used);
    } catch (const std::exception&) {
        throw ValueError{"a number"};
    }
    if (used != v.size() || !std::isfinite(out)) throw ValueError{"a finite number"};
    return out;
}

inline bool to_bool(const std::string& v) {
    if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
    if (v == "off" || v == "false" || v == "0" || v == "no") return false;
    throw ValueError{"on/off"};
}

inline std::string from_bool(bool b) { return b ? "on" : "off"; }

/// Shortest text that parses back to the same double.
inline std::string from_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

struct KeySpec {
    std::function<void(ExperimentConfig&, const std::string&)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

template <class T>
KeySpec int_key(T ExperimentConfig::*block, int T::*field) {
    return {[=](ExperimentConfig& c, const std::string& v) { (c.*block).*field = to_int(v); },
            [=](const ExperimentConfig& c) { return std::to_string((c.*block).*field); }};
}

template <class T>
KeySpec double_key(T ExperimentConfig::*block, double T::*field) {
    return {[=](ExperimentConfig& c, const std::string& v) { (c.*block).*field = to_double(v); },
            [=](const ExperimentConfig& c) { return from_double((c.*block).*field); }};
}

inline const std::map<std::string, KeySpec>& key_table() {
    static const std::map<std::string, KeySpec> table = [] {
        using C = ExperimentConfig;
        std::map<std::string, KeySpec> t;
        // [geometry]
        t["geometry.lambda_m"] = double_key(&C::geometry, &GeometryConfig::wavelength_m);
        t["geometry.t_sim_m"] = double_key(&C::geometry, &GeometryConfig::t_sim_m);
        t["geometry.layers"] = int_key(&C::geometry, &GeometryConfig::layers);
        t["geometry.atoms_rows"] = int_key(&C::geometry, &GeometryConfig::atoms_rows);
        t["geometry.atoms_cols"] = int_key(&C::geometry, &GeometryConfig::atoms_cols);
        t["geometry.tx_distance_m"] = {
            [](C& c, const std::string& v) {
                if (v == "auto") {
                    c.geometry.tx_distance_m.reset();
                } else {
                    c.geometry.tx_distance_m = to_double(v);
                }
            },
            [](const C& c) { return c.geometry.tx_distance_m ? from_double(*c.geometry.tx_distance_m) : "auto"; }};
        // [channel]
        t["channel.freq_hz"] = double_key(&C::channel, &ChannelConfig::carrier_freq_hz);
        t["channel.link_distance_m"] = double_key(&C::channel, &ChannelConfig::distance_m);
        t["channel.rician_k_db"] = double_key(&C::channel, &ChannelConfig::rician_k_db);
        t["channel.la_db"] = double_key(&C::channel, &ChannelConfig::atmospheric_loss_db);
        t["channel.le_db"] = double_key(&C::channel, &ChannelConfig::environment_loss_db);
        t["channel.noise_dbm"] = double_key(&C::channel, &ChannelConfig::noise_power_dbm);
        t["channel.tx_power_dbm"] = double_key(&C::channel, &ChannelConfig::tx_power_dbm);
        t["channel.rx_antennas"] = int_key(&C::channel, &ChannelConfig::num_rx_antennas);
        t["channel.channel_seed"] = {[](C& c, const std::string& v) { c.channel.seed = to_u64(v); },
                                     [](const C& c) { return std::to_string(c.channel.seed); }};
        // [training]
        t["training.epochs"] = int_key(&C::training, &TrainConfig::epochs);
        t["training.batch"] = int_key(&C::training, &TrainConfig::batch_size);
        t["training.lr"] = double_key(&C::training, &TrainConfig::learning_rate);
        t["training.weight_decay"] = double_key(&C::training, &TrainConfig::weight_decay);
        t["training.beta1"] = double_key(&C::training, &TrainConfig::beta1);
        t["training.beta2"] = double_key(&C::training, &TrainConfig::beta2);
        t["training.adam_eps"] = double_key(&C::training, &TrainConfig::adam_eps);
        t["training.sample_rate"] = double_key(&C::training, &TrainConfig::sample_rate);
        t["training.softmax_eps"] = double_key(&C::training, &TrainConfig::softmax_epsilon);
        t["training.train_noise"] = {[](C& c, const std::string& v) { c.training.train_noise = to_bool(v); },
                                     [](const C& c) { return from_bool(c.training.train_noise); }};
        t["training.lr_schedule"] = {[](C& c, const std::string& v) {
                                         if (v == "constant") {
                                             c.training.lr_schedule = LrSchedule::constant;
                                         } else if (v == "cosine") {
                                             c.training.lr_schedule = LrSchedule::cosine;
                                         } else {
                                             throw ValueError{"constant or cosine"};
                                         }
                                     },
                                     [](const C& c) {
                                         return std::string(c.training.lr_schedule == LrSchedule::cosine ? "cosine"
                                                                                                         : "constant");
                                     }};
        // [data]
        t["data.scene"] = {[](C& c, const std::string& v) { c.data.scene_path = v; },
                           [](const C& c) { return c.data.scene_path; }};
        t["data.dataset"] = {[](C& c, const std::string& v) { c.data.dataset_path = v; },
                             [](const C& c) { return c.data.dataset_path; }};
        t["data.patch_side"] = int_key(&C::data, &DataConfig::patch_side);
        t["data.patch_stride"] = int_key(&C::data, &DataConfig::patch_stride);
        t["data.downsample"] = {[](C& c, const std::string& v) { c.data.encoding.downsample = to_int(v); },
                                [](const C& c) { return std::to_string(c.data.encoding.downsample); }};
        t["data.phase_rotation"] = {[](C& c, const std::string& v) { c.data.encoding.phase_rotation = to_bool(v); },
                                    [](const C& c) { return from_bool(c.data.encoding.phase_rotation); }};
        t["data.rotation_angle_rad"] = {
            [](C& c, const std::string& v) { c.data.encoding.rotation_angle = to_double(v); },
            [](const C& c) { return from_double(c.data.encoding.rotation_angle); }};
        t["data.synth_height"] = {[](C& c, const std::string& v) { c.data.synth.height = to_int(v); },
                                  [](const C& c) { return std::to_string(c.data.synth.height); }};
        t["data.synth_width"] = {[](C& c, const std::string& v) { c.data.synth.width = to_int(v); },
                                 [](const C& c) { return std::to_string(c.data.synth.width); }};
        t["data.layout"] = {[](C& c, const std::string& v) {
                                if (v == "half-split") {
                                    c.data.synth.layout = SceneLayout::half_split;
                                } else if (v == "blobs") {
                                    c.data.synth.layout = SceneLayout::blobs;
                                } else {
                                    throw ValueError{"half-split or blobs"};
                                }
                            },
                            [](const C& c) {
                                return std::string(c.data.synth.layout == SceneLayout::half_split ? "half-split" : "blobs");
                            }};
        t["data.ocean_sigma"] = {[](C& c, const std::string& v) { c.data.synth.ocean_sigma = to_double(v); },
                                 [](const C& c) { return from_double(c.data.synth.ocean_sigma); }};
        t["data.land_sigma"] = {[](C& c, const std::string& v) { c.data.synth.land_sigma = to_double(v); },
                                [](const C& c) { return from_double(c.data.synth.land_sigma); }};
        t["data.texture"] = {[](C& c, const std::string& v) { c.data.synth.land_phase_texture = to_bool(v); },
                             [](const C& c) { return from_bool(c.data.synth.land_phase_texture); }};
        t["data.texture_period_px"] = {
            [](C& c, const std::string& v) { c.data.synth.texture_period_px = to_double(v); },
            [](const C& c) { return from_double(c.data.synth.texture_period_px); }};
        t["data.texture_angle_rad"] = {
            [](C& c, const std::string& v) { c.data.synth.texture_angle_rad = to_double(v); },
            [](const C& c) { return from_double(c.data.synth.texture_angle_rad); }};
        t["data.texture_strength"] = {
            [](C& c, const std::string& v) { c.data.synth.texture_strength = to_double(v); },
            [](const C& c) { return from_double(c.data.synth.texture_strength); }};
        // [experiment]
        t["experiment.seed"] = {[](C& c, const std::string& v) { c.seed = to_u64(v); },
                                [](const C& c) { return std::to_string(c.seed); }};
        t["experiment.model"] = {[](C& c, const std::string& v) {
                                     if (v == "sim") {
                                         c.model = ModelKind::sim;
                                     } else if (v == "digital") {
                                         c.model = ModelKind::digital;
                                     } else {
                                         throw ValueError{"sim or digital"};
                                     }
                                 },
                                 [](const C& c) { return std::string(to_string(c.model)); }};
        t["experiment.out_dir"] = {[](C& c, const std::string& v) { c.out_dir = v; },
                                   [](const C& c) { return c.out_dir; }};
        t["experiment.threads"] = {[](C& c, const std::string& v) {
                                       const int n = to_int(v);
                                       if (n < 0) throw ValueError{"a non-negative integer"};
                                       c.training.threads = static_cast<unsigned>(n);
                                   },
                                   [](const C& c) { return std::to_string(c.training.threads); }};
        return t;
    }();
    return table;
}

}  // namespace config_detail

/// Every accepted `section.key` name, sorted.
inline std::vector<std::string> config_keys() {
    std::vector<std::string> out;
    for (const auto& [k, _] : config_detail::key_table()) out.push_back(k);
    return out;
}

/// Sets one `section.key`; `where` prefixes error messages (e.g. "line 3").
inline void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value,
                           const std::string& where = "override") {
    const auto& table = config_detail::key_table();
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError(where + ": unknown key '" + key + "'");
    try {
        it->second.set(cfg, value);
    } catch (const config_detail::ValueError& e) {
        throw ConfigError(where + ": key '" + key + "' expects " + e.expected + ", got '" + value + "'");
    }
}

inline std::string get_config_value(const ExperimentConfig& cfg, const std::string& key) {
    const auto& table = config_detail::key_table();
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError("unknown key '" + key + "'");
    return it->second.get(cfg);
}

/// Applies `[section]` / `key = value` text on top of `cfg`. `#` and `;` start comments.
inline void apply_config_text(ExperimentConfig& cfg, const std::string& text, const std::string& source = "config") {
    std::istringstream in(text);
    std::string line;
    std::string section;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const std::string where = source + " line " + std::to_string(number);
        const auto comment = line.find_first_of("#;");
        if (comment != std::string::npos) line.erase(comment);
        line = config_detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where + ": malformed section header");
            section = config_detail::trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
        const std::string key = config_detail::trim(line.substr(0, eq));
        const std::string value = config_detail::trim(line.substr(eq + 1));
        if (section.empty()) throw ConfigError(where + ": key '" + key + "' outside any [section]");
        apply_override(cfg, section + "." + key, value, where);
    }
}

/// Built-in defaults overlaid with a config file.
inline ExperimentConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    ExperimentConfig cfg;
    apply_config_text(cfg, text.str(), path.string());
    return cfg;
}

/// Resolved configuration in the same `[section]` format the parser reads.
inline std::string format_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    std::string section;
    for (const auto& [key, entry] : config_detail::key_table()) {
        const auto dot = key.find('.');
        const std::string s = key.substr(0, dot);
        if (s != section) {
            if (!section.empty()) out << '\n';
            out << '[' << s << "]\n";
            section = s;
        }
        out << key.substr(dot + 1) << " = " << entry.get(cfg) << '\n';
    }
    return out.str();
}

/// Cross-field checks; everything that can be rejected before compute.
inline void validate(const ExperimentConfig& cfg) {
    const SimGeometry g = build_geometry(cfg.geometry);
    validate(cfg.channel);
    validate(cfg.training);
    const auto& d = cfg.data;
    if (d.patch_side < 1 || d.patch_stride < 1) throw ConfigError("patch_side and patch_stride must be positive");
    if (d.encoding.downsample < 1 || d.patch_side % d.encoding.downsample != 0) {
        throw ConfigError("downsample must divide patch_side");
    }
    const long long features = static_cast<long long>(d.patch_side / d.encoding.downsample) *
                               (d.patch_side / d.encoding.downsample);
    if (2 * features != g.atoms_per_layer()) {
        throw ConfigError("patches encode to " + std::to_string(2 * features) + " input atoms but the geometry has " +
                          std::to_string(g.atoms_per_layer()) + " (atoms_rows * atoms_cols)");
    }
    if (d.dataset_path.empty() && d.scene_path.empty()) {
        const SynthConfig& s = d.synth;
        if (s.height < 1 || s.width < 1 || !(s.ocean_sigma > 0.0) || !(s.land_sigma > 0.0)) {
            throw ConfigError("synthetic scene needs positive dimensions and sigmas");
        }
    }
}

// ---------------------------------------------------------------------------
// Pipeline

/// A module failure tagged with the pipeline stage that raised it.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& what)
        : Error("stage '" + stage + "': " + what), stage_(std::move(stage)) {}

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

namespace detail {

template <class Fn>
auto run_stage(const std::string& stage, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        throw ConfigError("stage '" + stage + "': " + e.what());
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(stage, e.what());
    }
}

}  // namespace detail

/// Raw input: either a scene or an already patched dataset.
struct RawData {
    std::optional<IqScene> scene;
    std::optional<Dataset> dataset;
};

inline IqScene synthesize_for(const ExperimentConfig& cfg) {
    CounterRng rng(derive_seed(cfg.seed, Purpose::synthesis));
    return synthesize_scene(cfg.data.synth, rng);
}

inline RawData load_raw_data(const ExperimentConfig& cfg) {
    return detail::run_stage("load", [&] {
        RawData raw;
        if (!cfg.data.dataset_path.empty()) {
            raw.dataset = load_dataset(cfg.data.dataset_path);
        } else if (!cfg.data.scene_path.empty()) {
            raw.scene = load_scene(cfg.data.scene_path);
        } else {
            raw.scene = synthesize_for(cfg);
        }
        return raw;
    });
}

/// Encoded patches plus their cells in the patch grid.
struct PreparedData {
    std::vector<EncodedSample> samples;
    std::vector<std::pair<int, int>> cells;  // (grid row, grid col) per sample
    int grid_rows = 0;
    int grid_cols = 0;
    std::size_t degenerate = 0;
};

inline PreparedData encode_data(const RawData& raw, const ExperimentConfig& cfg, Eigen::Index atoms) {
    PreparedData out;
    if (raw.scene) {
        if (!raw.scene->label_mask) throw LabelingError("scene has no label mask; cannot train or score");
        SceneEncoding enc = encode_scene(*raw.scene, cfg.data.patch_side, cfg.data.patch_stride, cfg.data.encoding, atoms);
        out.grid_rows = enc.grid_rows;
        out.grid_cols = enc.grid_cols;
        out.degenerate = enc.degenerate;
        out.samples.reserve(enc.windows.size());
        for (std::size_t i = 0; i < enc.windows.size(); ++i) {
            EncodedWindow& w = enc.windows[i];
            out.samples.push_back({encode_input(w.features, atoms), w.label, static_cast<std::uint64_t>(i)});
            out.cells.emplace_back(w.grid_row, w.grid_col);
        }
        return out;
    }
    const Dataset& data = *raw.dataset;
    std::set<int> rows;
    std::set<int> cols;
    for (const IqPatch& p : data.patches) {
        rows.insert(p.origin_row);
        cols.insert(p.origin_col);
    }
    const std::vector<int> row_index(rows.begin(), rows.end());
    const std::vector<int> col_index(cols.begin(), cols.end());
    out.grid_rows = static_cast<int>(row_index.size());
    out.grid_cols = static_cast<int>(col_index.size());
    for (std::size_t i = 0; i < data.patches.size(); ++i) {
        const IqPatch& p = data.patches[i];
        auto features = encode_features(p, cfg.data.encoding, atoms);
        if (!features) {
            ++out.degenerate;
            continue;
        }
        out.samples.push_back({encode_input(*features, atoms), p.label, static_cast<std::uint64_t>(i)});
        const int gr = static_cast<int>(std::lower_bound(row_index.begin(), row_index.end(), p.origin_row) - row_index.begin());
        const int gc = static_cast<int>(std::lower_bound(col_index.begin(), col_index.end(), p.origin_col) - col_index.begin());
        out.cells.emplace_back(gr, gc);
    }
    return out;
}

/// Fixed physics and encoded data for one configuration.
struct Workspace {
    SimGeometry geometry;
    Propagation optics;
    ChannelRealization channel;
    double tx_amplitude = 0.0;
    PreparedData data;
};

inline Workspace build_workspace(const ExperimentConfig& cfg, const RawData& raw) {
    Workspace ws;
    ws.geometry = detail::run_stage("geometry", [&] { return build_geometry(cfg.geometry); });
    ws.optics = detail::run_stage("propagation", [&] { return build_propagation(ws.geometry); });
    ws.channel = detail::run_stage("channel", [&] {
        CounterRng rng(derive_seed(cfg.channel.seed, Purpose::channel));
        return sample_rician(cfg.channel, ws.geometry.atoms_per_layer(), rng);
    });
    ws.tx_amplitude = dbm_to_amplitude(cfg.channel.tx_power_dbm);
    ws.data = detail::run_stage("encode", [&] { return encode_data(raw, cfg, ws.geometry.atoms_per_layer()); });
    if (ws.data.samples.empty()) throw StageError("encode", "no usable patches (window larger than the scene?)");
    return ws;
}

inline TrainConfig effective_training(const ExperimentConfig& cfg) {
    TrainConfig t = cfg.training;
    t.master_seed = cfg.seed;
    return t;
}

struct TrainOutcome {
    AnyParams params;
    std::vector<EpochRecord> history;
    std::size_t trained_patches = 0;
};

inline TrainOutcome train_stage(const ExperimentConfig& cfg, const Workspace& ws) {
    return detail::run_stage("train", [&] {
        const TrainConfig tc = effective_training(cfg);
        CounterRng init_rng(derive_seed(cfg.seed, Purpose::param_init));
        const AnyParams initial =
            init_params(cfg.model, ws.geometry.num_layers(), ws.geometry.atoms_per_layer(), init_rng);
        return std::visit(
            [&](const auto& p) {
                auto result = train(ws.data.samples, ws.optics, ws.channel, ws.tx_amplitude, tc, p);
                return TrainOutcome{AnyParams(std::move(result.params)), std::move(result.history),
                                    result.training_indices.size()};
            },
            initial);
    });
}

inline EvalResult eval_stage(const ExperimentConfig& cfg, const Workspace& ws, const AnyParams& params) {
    return detail::run_stage("evaluate", [&] {
        return evaluate(params, ws.data.samples, ws.optics, ws.channel, ws.tx_amplitude, effective_training(cfg));
    });
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
    if (!out) throw Error("write failed: " + path.string());
}

/// `epoch loss acc` per line.
inline std::string format_history(const std::vector<EpochRecord>& history) {
    std::ostringstream out;
    for (const EpochRecord& r : history) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "%d %.6f %.4f\n", r.epoch, r.loss, r.accuracy);
        out << buf;
    }
    return out.str();
}

/// Prediction per grid cell; cells without a usable patch stay class 0.
inline std::vector<std::size_t> class_grid(const PreparedData& data, const std::vector<std::size_t>& predictions) {
    std::vector<std::size_t> grid(static_cast<std::size_t>(data.grid_rows) * data.grid_cols, 0);
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const auto [r, c] = data.cells[i];
        grid[static_cast<std::size_t>(r) * data.grid_cols + c] = predictions[i];
    }
    return grid;
}

struct ExperimentArtifacts {
    std::filesystem::path report;
    std::filesystem::path history;
    std::filesystem::path params;
    std::filesystem::path class_map;
    std::filesystem::path config;
};

struct ExperimentResult {
    MetricsBundle metrics;
    std::vector<EpochRecord> history;
    std::size_t evaluated_patches = 0;
    std::size_t trained_patches = 0;
    ExperimentArtifacts artifacts;
};

inline std::string format_experiment_report(const ExperimentConfig& cfg, const MetricsBundle& m, std::size_t evaluated,
                                            std::size_t trained, std::size_t degenerate) {
    std::ostringstream out;
    out << format_report(m);
    out << "model " << to_string(cfg.model) << '\n';
    out << "layers " << cfg.geometry.layers << '\n';
    out << "tx_power_dbm " << config_detail::from_double(cfg.channel.tx_power_dbm) << '\n';
    out << "sample_rate " << config_detail::from_double(cfg.training.sample_rate) << '\n';
    out << "phase_rotation " << config_detail::from_bool(cfg.data.encoding.phase_rotation) << '\n';
    out << "patches_evaluated " << evaluated << '\n';
    out << "patches_trained " << trained << '\n';
    out << "patches_degenerate " << degenerate << '\n';
    return out.str();
}

/// synthesize/load -> patch -> train -> evaluate -> report, sharing `raw` data.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, const RawData& raw) {
    detail::run_stage("config", [&] { validate(cfg); });
    const Workspace ws = build_workspace(cfg, raw);
    TrainOutcome trained = train_stage(cfg, ws);
    const EvalResult eval = eval_stage(cfg, ws, trained.params);

    ExperimentResult result;
    result.metrics = eval.metrics;
    result.history = std::move(trained.history);
    result.evaluated_patches = eval.predictions.size();
    result.trained_patches = trained.trained_patches;

    detail::run_stage("write", [&] {
        const std::filesystem::path dir(cfg.out_dir);
        std::filesystem::create_directories(dir);
        ExperimentArtifacts& a = result.artifacts;
        a.report = dir / "report.txt";
        a.history = dir / "history.txt";
        a.params = dir / "params.simth1";
        a.class_map = dir / "class_map.pgm";
        a.config = dir / "config.ini";
        write_text(a.config, format_config(cfg));
        write_text(a.history, format_history(result.history));
        save_params(a.params, trained.params);
        export_class_map(class_grid(ws.data, eval.predictions), ws.data.grid_rows, ws.data.grid_cols,
                         static_cast<std::size_t>(cfg.channel.num_rx_antennas), a.class_map);
        write_text(a.report, format_experiment_report(cfg, result.metrics, result.evaluated_patches,
                                                      result.trained_patches, ws.data.degenerate));
    });
    return result;
}

inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    detail::run_stage("config", [&] { validate(cfg); });
    return run_experiment(cfg, load_raw_data(cfg));
}

// ---------------------------------------------------------------------------
// Ablation suite

struct AblationScenario {
    std::string name;
    std::string slug;
    std::vector<std::pair<std::string, std::string>> overrides;
};

/// The eight comparison rows, each differing from the base in one factor.
inline std::vector<AblationScenario> ablation_scenarios() {
    return {
        {"SIM-D2NN (L = 1)", "layers_1", {{"geometry.layers", "1"}}},
        {"SIM-D2NN (L = 6)", "layers_6", {{"geometry.layers", "6"}}},
        {"SIM-D2NN (S = 5%)", "sample_5", {{"training.sample_rate", "0.05"}}},
        {"SIM-D2NN (S = 20%)", "sample_20", {{"training.sample_rate", "0.20"}}},
        {"SIM-D2NN (P_t = 5 dBm)", "tx_5dbm", {{"channel.tx_power_dbm", "5"}}},
        {"SIM-D2NN (No phase rotation)", "no_rotation", {{"data.phase_rotation", "off"}}},
        {"SIM-D2NN (Baseline)", "baseline", {}},
        {"Digital DNN", "digital", {{"experiment.model", "digital"}}},
    };
}

struct AblationRow {
    AblationScenario scenario;
    std::optional<MetricsBundle> metrics;
    std::string error;
};

/// Runs every scenario on one shared dataset. A failing row is recorded and
/// the suite continues.
inline std::vector<AblationRow> run_ablation_suite(const ExperimentConfig& base,
                                                   const std::function<void(const AblationRow&)>& on_row = {}) {
    detail::run_stage("config", [&] { validate(base); });
    const RawData raw = load_raw_data(base);
    std::vector<AblationRow> rows;
    for (const AblationScenario& s : ablation_scenarios()) {
        AblationRow row{s, std::nullopt, {}};
        try {
            ExperimentConfig cfg = base;
            cfg.model = ModelKind::sim;
            for (const auto& [k, v] : s.overrides) apply_override(cfg, k, v, s.name);
            cfg.out_dir = (std::filesystem::path(base.out_dir) / s.slug).string();
            row.metrics = run_experiment(cfg, raw).metrics;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        if (on_row) on_row(row);
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::string format_ablation_table(const std::vector<AblationRow>& rows) {
    const char* headers[] = {"Precision (%)", "Recall (%)", "F1 Score (%)", "Overall Accuracy (%)"};
    std::size_t name_width = std::string("Ablation Setting").size();
    for (const AblationRow& r : rows) name_width = std::max(name_width, r.scenario.name.size());

    auto pad_right = [](std::string s, std::size_t w) { return s + std::string(w > s.size() ? w - s.size() : 0, ' '); };
    auto pad_left = [](std::string s, std::size_t w) { return std::string(w > s.size() ? w - s.size() : 0, ' ') + s; };

    std::ostringstream out;
    out << pad_right("Ablation Setting", name_width);
    for (const char* h : headers) out << " | " << h;
    out << '\n';
    std::string rule(name_width, '-');
    for (const char* h : headers) rule += "-+-" + std::string(std::string(h).size(), '-');
    out << rule << '\n';
    for (const AblationRow& r : rows) {
        if (r.scenario.slug == "digital") out << rule << '\n';
        out << pad_right(r.scenario.name, name_width);
        if (!r.metrics) {
            out << " | FAILED: " << r.error << '\n';
            continue;
        }
        const std::optional<double> cells[] = {r.metrics->precision, r.metrics->recall, r.metrics->f1,
                                               r.metrics->overall_accuracy};
        for (int i = 0; i < 4; ++i) out << " | " << pad_left(format_percent(cells[i]), std::string(headers[i]).size());
        out << '\n';
    }
    return out.str();
}

}  // namespace simd2nn
