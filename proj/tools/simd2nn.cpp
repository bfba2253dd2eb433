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
#include <CLI11.hpp>

#include <cstdio>
#include <deque>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "simd2nn/data.hpp"
#include "simd2nn/errors.hpp"
#include "simd2nn/experiment.hpp"
#include "simd2nn/geometry.hpp"
#include "simd2nn/network.hpp"
#include "simd2nn/propagation.hpp"

namespace {

using namespace simd2nn;

constexpr int exit_config = 1;
constexpr int exit_runtime = 2;

// Flags shared by every subcommand that builds a configuration. Values stay
// strings so they go through the same parser as the config file.
struct CommonOptions {
    std::string config_path;
    std::vector<std::string> sets;
    std::deque<std::pair<std::string, std::string>> bound;  // (key, raw value); deque keeps addresses stable
};

void add_flag(CLI::App* app, CommonOptions& opts, const std::string& flag, const std::string& key,
              const std::string& help) {
    auto& slot = opts.bound.emplace_back(key, std::string{});
    app->add_option(flag, slot.second, help + " (" + key + ")");
}

void add_common(CLI::App* app, CommonOptions& opts) {
    app->add_option("-c,--config", opts.config_path, "INI-style config file");
    app->add_option("--set", opts.sets, "Override any key, e.g. --set training.lr=0.02");
    add_flag(app, opts, "--layers", "geometry.layers", "Trainable metasurface layers");
    add_flag(app, opts, "--atoms-rows", "geometry.atoms_rows", "Meta-atom rows per layer");
    add_flag(app, opts, "--atoms-cols", "geometry.atoms_cols", "Meta-atom columns per layer");
    add_flag(app, opts, "--epochs", "training.epochs", "Training epochs");
    add_flag(app, opts, "--batch", "training.batch", "Mini-batch size");
    add_flag(app, opts, "--lr", "training.lr", "Learning rate");
    add_flag(app, opts, "--sample-rate", "training.sample_rate", "Fraction of patches used for training");
    add_flag(app, opts, "--train-noise", "training.train_noise", "Receiver noise while training (on/off)");
    add_flag(app, opts, "--seed", "experiment.seed", "Master seed");
    add_flag(app, opts, "--model", "experiment.model", "sim or digital");
    add_flag(app, opts, "--threads", "experiment.threads", "Worker threads, 0 = all cores");
    add_flag(app, opts, "--out", "experiment.out_dir", "Output directory");
    add_flag(app, opts, "--link-distance", "channel.link_distance_m", "Link distance in metres");
    add_flag(app, opts, "--tx-power", "channel.tx_power_dbm", "Transmit power in dBm");
    add_flag(app, opts, "--phase-rotation", "data.phase_rotation", "Phase-rotation augmentation (on/off)");
    add_flag(app, opts, "--scene", "data.scene", "SIMSC1 scene to patch");
    add_flag(app, opts, "--dataset", "data.dataset", "SIMIQ1 patch dataset");
    add_flag(app, opts, "--patch-side", "data.patch_side", "Patch side in pixels");
    add_flag(app, opts, "--patch-stride", "data.patch_stride", "Patch stride in pixels");
}

// defaults <- config file <- --set <- named flags
ExperimentConfig resolve(const CommonOptions& opts) {
    ExperimentConfig cfg = opts.config_path.empty() ? ExperimentConfig{} : parse_config_file(opts.config_path);
    for (const std::string& s : opts.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
        apply_override(cfg, s.substr(0, eq), s.substr(eq + 1), "--set");
    }
    for (const auto& [key, value] : opts.bound) {
        if (!value.empty()) apply_override(cfg, key, value, "command line");
    }
    return cfg;
}

void print_metrics(const MetricsBundle& m) { std::cout << format_report(m); }

int cmd_synth(const CommonOptions& opts, const std::string& out_path) {
    ExperimentConfig cfg = resolve(opts);
    const IqScene scene = synthesize_for(cfg);
    save_scene(out_path, scene);
    std::cout << "wrote " << out_path << " (" << scene.height << "x" << scene.width << ")\n";
    return 0;
}

int cmd_patch(const CommonOptions& opts, const std::string& in_path, const std::string& out_path) {
    ExperimentConfig cfg = resolve(opts);
    const IqScene scene = load_scene(in_path);
    const PatchExtraction ex = extract_patches(scene, cfg.data.patch_side, cfg.data.patch_stride);
    if (ex.window_too_large) std::cerr << "warning: patch window larger than the scene, dataset is empty\n";
    save_dataset(out_path, ex.dataset);
    std::cout << "wrote " << out_path << " (" << ex.dataset.patches.size() << " patches, grid " << ex.grid_rows << "x"
              << ex.grid_cols << ")\n";
    return 0;
}

int cmd_train(const CommonOptions& opts) {
    ExperimentConfig cfg = resolve(opts);
    validate(cfg);
    const Workspace ws = build_workspace(cfg, load_raw_data(cfg));
    const TrainOutcome trained = train_stage(cfg, ws);
    const std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    save_params(dir / "params.simth1", trained.params);
    write_text(dir / "history.txt", format_history(trained.history));
    write_text(dir / "config.ini", format_config(cfg));
    if (!trained.history.empty()) {
        const EpochRecord& last = trained.history.back();
        std::printf("epoch %d loss %.6f acc %.4f\n", last.epoch, last.loss, last.accuracy);
    }
    std::cout << "wrote " << (dir / "params.simth1").string() << '\n';
    return 0;
}

int cmd_eval(const CommonOptions& opts, const std::string& params_path) {
    ExperimentConfig cfg = resolve(opts);
    const AnyParams params = load_params(params_path);
    cfg.model = std::visit([](const auto& p) { return std::decay_t<decltype(p)>::kind; }, params);
    validate(cfg);
    const Workspace ws = build_workspace(cfg, load_raw_data(cfg));
    const EvalResult eval = eval_stage(cfg, ws, params);
    const std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    write_text(dir / "report.txt",
               format_experiment_report(cfg, eval.metrics, eval.predictions.size(), 0, ws.data.degenerate));
    export_class_map(class_grid(ws.data, eval.predictions), ws.data.grid_rows, ws.data.grid_cols,
                     static_cast<std::size_t>(cfg.channel.num_rx_antennas), dir / "class_map.pgm");
    print_metrics(eval.metrics);
    return 0;
}

int cmd_run(const CommonOptions& opts) {
    const ExperimentConfig cfg = resolve(opts);
    const ExperimentResult r = run_experiment(cfg);
    print_metrics(r.metrics);
    std::cout << "wrote " << r.artifacts.report.string() << '\n';
    return 0;
}

int cmd_ablate(const CommonOptions& opts) {
    const ExperimentConfig cfg = resolve(opts);
    const auto rows = run_ablation_suite(cfg, [](const AblationRow& row) {
        if (row.metrics) {
            std::cerr << row.scenario.name << ": accuracy " << format_fraction(row.metrics->overall_accuracy) << '\n';
        } else {
            std::cerr << row.scenario.name << ": FAILED " << row.error << '\n';
        }
    });
    const std::string table = format_ablation_table(rows);
    std::filesystem::create_directories(cfg.out_dir);
    write_text(std::filesystem::path(cfg.out_dir) / "ablation.txt", table);
    std::cout << table;
    for (const AblationRow& row : rows) {
        if (!row.metrics) return exit_runtime;
    }
    return 0;
}

int cmd_dump_matrix(const CommonOptions& opts, int layer, const std::string& out_path) {
    const ExperimentConfig cfg = resolve(opts);
    const SimGeometry g = build_geometry(cfg.geometry);
    const TransmissionMatrix w = build_transmission_matrix(g, layer);
    if (out_path.empty() || out_path == "-") {
        dump_matrix(w, std::cout);
    } else {
        std::ofstream out(out_path);
        if (!out) throw Error("cannot write " + out_path);
        dump_matrix(w, out);
    }
    return 0;
}

int cmd_config(const CommonOptions& opts) {
    const ExperimentConfig cfg = resolve(opts);
    validate(cfg);
    std::cout << format_config(cfg);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"simd2nn: stacked-metasurface diffractive network simulator"};
    app.require_subcommand(1);

    CommonOptions synth_opts, patch_opts, train_opts, eval_opts, run_opts, ablate_opts, dump_opts, config_opts;
    std::string synth_out, patch_in, patch_out, eval_params, dump_out;
    int dump_layer = 1;

    auto* synth = app.add_subcommand("synth", "Generate a labelled synthetic IQ scene (SIMSC1)");
    add_common(synth, synth_opts);
    synth->add_option("-o,--output", synth_out, "Scene file to write")->required();

    auto* patch = app.add_subcommand("patch", "Cut a scene into labelled patches (SIMIQ1)");
    add_common(patch, patch_opts);
    patch->add_option("-i,--input", patch_in, "SIMSC1 scene")->required();
    patch->add_option("-o,--output", patch_out, "Dataset file to write")->required();

    auto* train = app.add_subcommand("train", "Train and write params.simth1 and history.txt");
    add_common(train, train_opts);

    auto* eval = app.add_subcommand("eval", "Evaluate saved parameters; writes report.txt and class_map.pgm");
    add_common(eval, eval_opts);
    eval->add_option("-p,--params", eval_params, "SIMTH1 parameter file")->required();

    auto* run = app.add_subcommand("run", "Full pipeline: data, train, evaluate, report");
    add_common(run, run_opts);

    auto* ablate = app.add_subcommand("ablate", "Run the eight-row ablation table");
    add_common(ablate, ablate_opts);

    auto* dump = app.add_subcommand("dump-matrix", "Print one transmission matrix as `row col re im` lines");
    add_common(dump, dump_opts);
    dump->add_option("--layer", dump_layer, "Destination layer, 1..L")->default_val(1);
    dump->add_option("-o,--output", dump_out, "File to write, default stdout");

    auto* config = app.add_subcommand("config", "Print the resolved configuration");
    add_common(config, config_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_config;
    }

    try {
        if (*synth) return cmd_synth(synth_opts, synth_out);
        if (*patch) return cmd_patch(patch_opts, patch_in, patch_out);
        if (*train) return cmd_train(train_opts);
        if (*eval) return cmd_eval(eval_opts, eval_params);
        if (*run) return cmd_run(run_opts);
        if (*ablate) return cmd_ablate(ablate_opts);
        if (*dump) return cmd_dump_matrix(dump_opts, dump_layer, dump_out);
        if (*config) return cmd_config(config_opts);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_runtime;
    }
    return exit_config;
}
