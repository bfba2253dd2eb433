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
// Acceptance driver: one PASS/FAIL line per criterion, non-zero exit if any fail.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "simd2nn/experiment.hpp"

using namespace simd2nn;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

std::filesystem::path scratch(const std::string& name) {
    const auto p = std::filesystem::temp_directory_path() / ("simd2nn_acceptance_" + name);
    std::filesystem::remove_all(p);
    return p;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

Outcome coefficient_example() {
    const cplx w = diffraction_coefficient(0.0125, 1.0, 0.0125, 0.0125, 0.025);
    const double err = std::max(std::abs(w.real() + 0.1591549), std::abs(w.imag() - 0.5));
    return {err <= 1e-6, fmt("w = %.7f%+.7fj, max component error %.2e", w.real(), w.imag(), err)};
}

Outcome path_loss_examples() {
    const double unit = fspl_db(1.0, 1.0);
    const double ku = fspl_db(1000.0, 12e9);
    return {unit == -147.55 && std::abs(ku - 114.03) <= 0.01, fmt("fspl(1,1) = %.2f, fspl(1000,12e9) = %.4f", unit, ku)};
}

Outcome forward_oracle() {
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const oracle::Instance in = oracle::random_instance(10000 + seed, 4, 3, 2);
        const EncodedInput enc = encode_input(in.features, in.geometry.atoms_per_layer());
        const ForwardCache cache = forward(in.phases, enc, in.optics, in.channel, in.amp, nullptr);
        std::vector<std::vector<oracle::cd>> responses;
        for (int l = 0; l < in.phases.layers(); ++l) {
            std::vector<oracle::cd> r;
            for (Eigen::Index m = 0; m < in.phases.atoms(); ++m) r.push_back(std::polar(1.0, in.phases.theta(l, m)));
            responses.push_back(r);
        }
        const std::vector<oracle::cd> feats(in.features.data(), in.features.data() + in.features.size());
        const auto ref = oracle::dense_forward(in.geometry.rows(), in.geometry.cols(), in.geometry.wavelength(),
                                               in.geometry.sim_thickness(), responses, feats,
                                               oracle::to_dense(in.channel.h_matrix), in.amp);
        double scale = 0.0;
        for (const auto& v : ref) scale = std::max(scale, std::abs(v));
        for (std::size_t k = 0; k < ref.size(); ++k) worst = std::max(worst, std::abs(cache.y(k) - ref[k]) / scale);
    }
    return {worst <= 1e-12, fmt("100 instances, worst relative error %.2e", worst)};
}

double fd_loss(const PhaseParams& p, const oracle::Instance& in, const EncodedInput& enc) {
    return loss(forward(p, enc, in.optics, in.channel, in.amp, nullptr).y, in.label, 1e-12);
}

Outcome gradient_oracle() {
    double worst = 0.0;
    const double h = 1e-5;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const oracle::Instance in = oracle::random_instance(20000 + seed, 3, 3);
        const EncodedInput enc = encode_input(in.features, in.geometry.atoms_per_layer());
        const ForwardCache cache = forward(in.phases, enc, in.optics, in.channel, in.amp, nullptr);
        const RMatrix g = backward(cache, in.phases, in.optics, in.channel, in.label, 1e-12);
        std::vector<double> analytic, numeric;
        double scale = 0.0;
        for (int l = 0; l < in.phases.layers(); ++l) {
            for (Eigen::Index m = 0; m < in.phases.atoms(); ++m) {
                PhaseParams up = in.phases, down = in.phases;
                up.theta(l, m) += h;
                down.theta(l, m) -= h;
                numeric.push_back((fd_loss(up, in, enc) - fd_loss(down, in, enc)) / (2 * h));
                analytic.push_back(g(l, m));
                scale = std::max(scale, std::abs(numeric.back()));
            }
        }
        // Components far below the instance's gradient scale or the differencing
        // round-off are compared in absolute terms (single-atom layers have an
        // exactly zero gradient).
        const double floor = std::max(1e-3 * scale, 1e-4 * fd_loss(in.phases, in, enc));
        for (std::size_t i = 0; i < analytic.size(); ++i) {
            const double denom = std::max({std::abs(analytic[i]), std::abs(numeric[i]), floor});
            worst = std::max(worst, std::abs(analytic[i] - numeric[i]) / denom);
        }
    }
    return {worst < 1e-5, fmt("50 instances, worst relative error %.2e", worst)};
}

Outcome channel_statistics() {
    std::ostringstream detail;
    bool pass = true;
    for (double k_db : {-300.0, 0.0, 20.0, 300.0}) {
        CounterRng rng(derive_seed(99, Purpose::channel, static_cast<std::uint64_t>(k_db + 1000)));
        const double power = sample_small_scale(k_db, 1, 100000, rng).cwiseAbs2().mean();
        pass = pass && std::abs(power - 1.0) <= 0.02;
        detail << "K=" << k_db << "dB:" << fmt("%.4f", power) << ' ';
    }
    CounterRng rng(1);
    const double los = (sample_small_scale(300.0, 2, 256, rng).array() - cplx(1.0, 0.0)).abs().maxCoeff();
    pass = pass && los < 1e-12;
    detail << fmt("LoS deviation %.1e", los);
    return {pass, detail.str()};
}

// Reduced baseline: 32-pixel patches at stride 8 over a 384x384 half-split
// scene (2025 patches), downsample 4 -> 128 atoms on an 8x16 grid, two layers,
// 30 epochs. The link is shortened to 30 m so the 16x smaller aperture keeps
// roughly the baseline SNR.
ExperimentConfig reduced_baseline(const std::filesystem::path& out) {
    ExperimentConfig cfg;
    apply_config_text(cfg, R"(
[geometry]
layers = 2
atoms_rows = 8
atoms_cols = 16
[channel]
link_distance_m = 30
[training]
epochs = 30
[data]
patch_side = 32
patch_stride = 8
downsample = 4
synth_height = 384
synth_width = 384
layout = half-split
ocean_sigma = 0.3
land_sigma = 1.0
[experiment]
seed = 1
)",
                      "acceptance");
    cfg.out_dir = out.string();
    return cfg;
}

struct SharedRuns {
    std::optional<ExperimentResult> sim;
};

Outcome end_to_end(SharedRuns& shared) {
    const auto dir = scratch("e2e");
    ExperimentConfig cfg = reduced_baseline(dir / "sim");
    const RawData raw = load_raw_data(cfg);
    const ExperimentResult sim = run_experiment(cfg, raw);
    cfg.model = ModelKind::digital;
    cfg.out_dir = (dir / "digital").string();
    const ExperimentResult dig = run_experiment(cfg, raw);
    shared.sim = sim;
    const double a = sim.metrics.overall_accuracy;
    const double b = dig.metrics.overall_accuracy;
    std::string detail = fmt("patches %.0f, SIM accuracy %.4f, digital accuracy %.4f",
                             static_cast<double>(sim.evaluated_patches), a, b);
    return {sim.evaluated_patches >= 2000 && a >= 0.95 && b >= a, detail};
}

Outcome rotation_ablation(SharedRuns& shared) {
    const auto dir = scratch("rotation");
    ExperimentConfig cfg = reduced_baseline(dir / "with");
    const RawData raw = load_raw_data(cfg);
    const MetricsBundle with = shared.sim ? shared.sim->metrics : run_experiment(cfg, raw).metrics;
    cfg.data.encoding.phase_rotation = false;
    cfg.out_dir = (dir / "without").string();
    const MetricsBundle without = run_experiment(cfg, raw).metrics;
    const double f_with = with.f1.value_or(0.0);
    const double f_without = without.f1.value_or(0.0);
    return {f_with - f_without >= 0.05, fmt("F1 with rotation %.4f, without %.4f, drop %.4f", f_with, f_without,
                                            f_with - f_without)};
}

Outcome determinism() {
    const auto a = scratch("det_a");
    const auto b = scratch("det_b");
    ExperimentConfig ca = reduced_baseline(a);
    ca.training.epochs = 5;
    ExperimentConfig cb = ca;
    cb.out_dir = b.string();
    run_experiment(ca);
    run_experiment(cb);
    bool same = true;
    for (const char* f : {"report.txt", "history.txt", "params.simth1"}) same = same && slurp(a / f) == slurp(b / f);
    return {same, same ? "report, history and params byte-identical" : "artifacts differ"};
}

Outcome format_round_trips() {
    const auto dir = scratch("formats");
    std::filesystem::create_directories(dir);
    CounterRng rng(777);
    int ok = 0;
    for (int t = 0; t < 100; ++t) {
        Dataset d;
        d.side = 1 + static_cast<int>(rng.uniform() * 8);
        const int count = static_cast<int>(rng.uniform() * 6);
        for (int i = 0; i < count; ++i) {
            IqPatch p;
            p.side = d.side;
            p.label = static_cast<std::uint8_t>(rng.uniform() * 2);
            p.origin_row = static_cast<int>(rng.uniform() * 5000);
            p.origin_col = static_cast<int>(rng.uniform() * 5000);
            for (int k = 0; k < d.side * d.side; ++k) {
                p.samples.emplace_back(static_cast<float>(rng.normal() * 1e3), static_cast<float>(rng.normal() * 1e-3));
            }
            d.patches.push_back(std::move(p));
        }
        save_dataset(dir / "d.simiq1", d);
        const bool ds_ok = load_dataset(dir / "d.simiq1") == d;

        IqScene s;
        s.height = 1 + static_cast<int>(rng.uniform() * 16);
        s.width = 1 + static_cast<int>(rng.uniform() * 16);
        for (int k = 0; k < s.height * s.width; ++k) {
            s.samples.emplace_back(static_cast<float>(rng.normal()), static_cast<float>(rng.normal()));
        }
        if (rng.uniform() < 0.5) {
            std::vector<std::uint8_t> mask;
            for (int k = 0; k < s.height * s.width; ++k) mask.push_back(rng.uniform() < 0.5 ? ocean : land);
            s.label_mask = mask;
        }
        save_scene(dir / "s.simsc1", s);
        const IqScene back = load_scene(dir / "s.simsc1");
        const bool sc_ok = back.height == s.height && back.width == s.width && back.samples == s.samples &&
                           back.label_mask == s.label_mask;

        const std::size_t k = 2 + static_cast<std::size_t>(rng.uniform() * 4);
        std::vector<std::size_t> grid(static_cast<std::size_t>(s.height) * s.width);
        for (auto& v : grid) v = static_cast<std::size_t>(rng.uniform() * static_cast<double>(k));
        export_class_map(grid, s.height, s.width, k, dir / "m.pgm");
        const GrayImage img = read_pgm(dir / "m.pgm");
        const bool pgm_ok = img.rows == s.height && img.cols == s.width && class_grid_from_pixels(img, k) == grid;
        ok += ds_ok && sc_ok && pgm_ok ? 1 : 0;
    }
    std::filesystem::remove_all(dir);
    return {ok == 100, fmt("%.0f/100 cases identical for SIMIQ1, SIMSC1 and PGM", ok)};
}

Outcome invariances() {
    CounterRng rng(31337);
    double worst_loss = 0.0;
    int argmax_flips = 0;
    double worst_null = 0.0;
    for (int i = 0; i < 200; ++i) {
        CVector y(2);
        y << rng.complex_normal(1.0), rng.complex_normal(1.0);
        const std::size_t label = static_cast<std::size_t>(i % 2);
        const double base = loss(y, label, 1e-12);
        for (double c : {1e-9, 1e-3, 7.0, 1e6}) {
            worst_loss = std::max(worst_loss, std::abs(loss(c * y, label, 1e-12) - base) / base);
            argmax_flips += classify(c * y) != classify(y) ? 1 : 0;
        }
    }
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const oracle::Instance in = oracle::random_instance(30000 + seed, 4, 3);
        const EncodedInput enc = encode_input(in.features, in.geometry.atoms_per_layer());
        const ForwardCache cache = forward(in.phases, enc, in.optics, in.channel, in.amp, nullptr);
        const RMatrix g = backward(cache, in.phases, in.optics, in.channel, in.label, 1e-12);
        const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
        for (int l = 0; l < g.rows(); ++l) worst_null = std::max(worst_null, std::abs(g.row(l).sum()) / scale);
    }
    return {worst_loss <= 1e-12 && argmax_flips == 0 && worst_null < 1e-10,
            fmt("loss scale error %.1e, argmax flips %.0f, phase-null residual %.1e", worst_loss, argmax_flips,
                worst_null)};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = [] {
        static SharedRuns shared;
        return std::vector<std::pair<std::string, std::function<Outcome()>>>{
            {"diffraction coefficient example", coefficient_example},
            {"free-space path loss examples", path_loss_examples},
            {"forward pass equals dense product", forward_oracle},
            {"phase gradient equals central differences", gradient_oracle},
            {"Rician fading power and LoS limit", channel_statistics},
            {"synthetic end-to-end accuracy, digital >= SIM", [] { return end_to_end(shared); }},
            {"no phase rotation lowers F1 by >= 0.05", [] { return rotation_ablation(shared); }},
            {"byte-identical repeated runs", determinism},
            {"file format round-trips", format_round_trips},
            {"loss, argmax and phase invariances", invariances},
        };
    }();

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s %zu %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    o.detail.c_str(), secs);
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
