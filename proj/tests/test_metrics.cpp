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

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "simd2nn/metrics.hpp"
#include "simd2nn/random.hpp"

using namespace simd2nn;
using Catch::Approx;

namespace {

// labels then predictions for a confusion of tn/fp/fn/tp
void fill(std::vector<std::size_t>& pred, std::vector<std::size_t>& lab, std::size_t tn, std::size_t fp,
          std::size_t fn, std::size_t tp) {
    auto add = [&](std::size_t n, std::size_t l, std::size_t p) {
        for (std::size_t i = 0; i < n; ++i) {
            lab.push_back(l);
            pred.push_back(p);
        }
    };
    add(tn, 0, 0);
    add(fp, 0, 1);
    add(fn, 1, 0);
    add(tp, 1, 1);
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("simd2nn_test_metrics_" + name);
}

}  // namespace

TEST_CASE("metric examples") {
    std::vector<std::size_t> p, l;
    fill(p, l, 9, 1, 1, 9);
    const MetricsBundle m = compute_metrics(p, l);
    CHECK(*m.precision == Approx(0.9));
    CHECK(*m.recall == Approx(0.9));
    CHECK(*m.f1 == Approx(0.9));
    CHECK(m.overall_accuracy == Approx(0.9));
    CHECK(m.confusion[0][1] == 1);
    CHECK(m.total() == 20);

    const MetricsBundle perfect = compute_metrics(l, l);
    CHECK(*perfect.precision == 1.0);
    CHECK(*perfect.recall == 1.0);
    CHECK(*perfect.f1 == 1.0);
    CHECK(perfect.overall_accuracy == 1.0);

    const MetricsBundle none = compute_metrics(std::vector<std::size_t>(20, 0), l);
    CHECK_FALSE(none.precision.has_value());
    CHECK(*none.recall == 0.0);
    CHECK_FALSE(none.f1.has_value());
    CHECK(none.overall_accuracy == Approx(0.5));
    CHECK(format_fraction(none.precision) == "n/a");

    CHECK_THROWS_AS(compute_metrics({0, 1}, {0}), ShapeError);
    CHECK_THROWS_AS(compute_metrics({}, {}), ShapeError);
    CHECK_THROWS_AS(compute_metrics({2}, {0}), ShapeError);
    CHECK_THROWS_AS(compute_metrics({0}, {0}, 2), ConfigError);
}

TEST_CASE("metrics are permutation invariant and accuracy ignores the positive class") {
    CounterRng rng(17);
    for (int t = 0; t < 50; ++t) {
        const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 200);
        std::vector<std::size_t> p(n), l(n);
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = rng.uniform() < 0.5 ? 0 : 1;
            l[i] = rng.uniform() < 0.5 ? 0 : 1;
        }
        const MetricsBundle a = compute_metrics(p, l);
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[static_cast<std::size_t>(rng.uniform() * i)]);
        std::vector<std::size_t> p2(n), l2(n);
        for (std::size_t i = 0; i < n; ++i) {
            p2[i] = p[order[i]];
            l2[i] = l[order[i]];
        }
        const MetricsBundle b = compute_metrics(p2, l2);
        CHECK(a.confusion == b.confusion);
        CHECK(a.precision == b.precision);
        CHECK(a.recall == b.recall);
        CHECK(a.f1 == b.f1);
        CHECK(a.overall_accuracy == b.overall_accuracy);
        CHECK(compute_metrics(p, l, 0).overall_accuracy == a.overall_accuracy);
        if (a.f1) {
            CHECK(*a.f1 >= 0.0);
            CHECK(*a.f1 <= 1.0);
        }
    }
}

TEST_CASE("number formatting") {
    CHECK(format_fraction(0.905412) == "0.9054");
    CHECK(format_percent(0.905412) == "90.54");
    CHECK(format_percent(1.0) == "100.0");
    CHECK(format_percent(0.05) == "5.000");
    CHECK(format_percent(std::nullopt) == "n/a");
    const MetricsBundle m = compute_metrics({1, 1}, {1, 0});
    CHECK(format_report(m) == "precision 0.5000\nrecall 1.0000\nf1 0.6667\noverall_accuracy 0.5000\n");
}

TEST_CASE("class map examples") {
    const auto path = temp_file("map.pgm");
    export_class_map({0, 1, 1, 0}, 2, 2, 2, path);
    std::ifstream in(path, std::ios::binary);
    const std::string bytes{std::istreambuf_iterator<char>(in), {}};
    CHECK(bytes == std::string("P5\n2 2\n255\n") + std::string("\x00\xff\xff\x00", 4));

    export_class_map({1}, 1, 1, 3, path);
    const GrayImage g = read_pgm(path);
    CHECK(g.pixels == std::vector<std::uint8_t>{128});

    CHECK_THROWS_AS(export_class_map({0, 1, 0}, 2, 2, 2, path), ShapeError);
    CHECK_THROWS_AS(export_class_map({0, 2}, 1, 2, 2, path), ShapeError);
    std::filesystem::remove(path);
}

TEST_CASE("class maps round-trip") {
    const auto path = temp_file("rt.pgm");
    CounterRng rng(3);
    for (int t = 0; t < 30; ++t) {
        const int rows = 1 + static_cast<int>(rng.uniform() * 20);
        const int cols = 1 + static_cast<int>(rng.uniform() * 20);
        const std::size_t k = 2 + static_cast<std::size_t>(rng.uniform() * 5);
        std::vector<std::size_t> grid(static_cast<std::size_t>(rows) * cols);
        for (auto& v : grid) v = static_cast<std::size_t>(rng.uniform() * static_cast<double>(k));
        export_class_map(grid, rows, cols, k, path);
        const GrayImage g = read_pgm(path);
        CHECK(g.rows == rows);
        CHECK(g.cols == cols);
        CHECK(class_grid_from_pixels(g, k) == grid);
    }
    std::filesystem::remove(path);
}

TEST_CASE("malformed class maps are rejected") {
    const auto path = temp_file("bad.pgm");
    auto write = [&](const std::string& s) {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out << s;
    };
    write("P5\n2 2\n255\nabc");
    CHECK_THROWS_AS(read_pgm(path), FormatError);
    write("P5\nx 2\n255\n");
    CHECK_THROWS_AS(read_pgm(path), FormatError);
    write("P5\n99999 99999\n255\n");
    CHECK_THROWS_AS(read_pgm(path), FormatError);
    write("P6\n1 1\n255\n\x01");
    CHECK_THROWS_AS(read_pgm(path), FormatError);
    std::filesystem::remove(path);
}
