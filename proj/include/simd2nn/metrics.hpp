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
#include <cstdio>
#include <filesystem>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "simd2nn/binary_io.hpp"
#include "simd2nn/errors.hpp"

namespace simd2nn {

/// Confusion statistics. Precision, recall and F1 are one-vs-rest for
/// `positive_class`; nullopt marks an empty denominator.
struct MetricsBundle {
    std::vector<std::vector<std::size_t>> confusion;  // [label][prediction]
    std::size_t positive_class = 1;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> f1;
    double overall_accuracy = 0.0;

    std::size_t total() const {
        std::size_t n = 0;
        for (const auto& row : confusion) {
            for (std::size_t v : row) n += v;
        }
        return n;
    }
};

inline MetricsBundle compute_metrics(const std::vector<std::size_t>& predictions, const std::vector<std::size_t>& labels,
                                     std::size_t positive_class = 1, std::size_t num_classes = 2) {
    if (predictions.size() != labels.size()) throw ShapeError("predictions and labels differ in length");
    if (predictions.empty()) throw ShapeError("no predictions to score");
    if (positive_class >= num_classes) throw ConfigError("positive class outside the class range");

    MetricsBundle out;
    out.positive_class = positive_class;
    out.confusion.assign(num_classes, std::vector<std::size_t>(num_classes, 0));
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (predictions[i] >= num_classes || labels[i] >= num_classes) throw ShapeError("class index out of range");
        ++out.confusion[labels[i]][predictions[i]];
    }

    std::size_t trace = 0;
    std::size_t tp = out.confusion[positive_class][positive_class];
    std::size_t fp = 0;
    std::size_t fn = 0;
    for (std::size_t k = 0; k < num_classes; ++k) {
        trace += out.confusion[k][k];
        if (k == positive_class) continue;
        fp += out.confusion[k][positive_class];
        fn += out.confusion[positive_class][k];
    }
    out.overall_accuracy = static_cast<double>(trace) / static_cast<double>(predictions.size());
    if (tp + fp > 0) out.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    if (tp + fn > 0) out.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    if (out.precision && out.recall && (*out.precision + *out.recall) > 0.0) {
        out.f1 = 2.0 * *out.precision * *out.recall / (*out.precision + *out.recall);
    } else if (out.precision && out.recall) {
        out.f1 = 0.0;
    }
    return out;
}

inline std::string format_fraction(const std::optional<double>& v) {
    if (!v) return "n/a";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", *v);
    return buf;
}

/// Four significant digits as a percentage, e.g. "90.54".
inline std::string format_percent(const std::optional<double>& v) {
    if (!v) return "n/a";
    char buf[32];
    const double pct = *v * 100.0;
    const int digits = pct >= 100.0 ? 1 : (pct >= 10.0 ? 2 : 3);
    std::snprintf(buf, sizeof buf, "%.*f", digits, pct);
    return buf;
}

/// One `name value` line per metric.
inline std::string format_report(const MetricsBundle& m) {
    std::ostringstream out;
    out << "precision " << format_fraction(m.precision) << '\n';
    out << "recall " << format_fraction(m.recall) << '\n';
    out << "f1 " << format_fraction(m.f1) << '\n';
    out << "overall_accuracy " << format_fraction(m.overall_accuracy) << '\n';
    return out.str();
}

/// Binary PGM (P5), one pixel per patch, class k -> round(255 k / (K - 1)).
inline void export_class_map(const std::vector<std::size_t>& grid, int rows, int cols, std::size_t num_classes,
                             const std::filesystem::path& path) {
    if (rows < 1 || cols < 1 || grid.size() != static_cast<std::size_t>(rows) * cols) {
        throw ShapeError("class grid has " + std::to_string(grid.size()) + " cells, expected " +
                         std::to_string(rows) + "x" + std::to_string(cols));
    }
    if (num_classes < 2) throw ConfigError("class map needs at least two classes");
    io::ByteWriter w;
    w.magic("P5\n" + std::to_string(cols) + " " + std::to_string(rows) + "\n255\n");
    for (std::size_t k : grid) {
        if (k >= num_classes) throw ShapeError("class index out of range in class map");
        w.u8(static_cast<std::uint8_t>(std::lround(255.0 * static_cast<double>(k) / static_cast<double>(num_classes - 1))));
    }
    w.save(path);
}

struct GrayImage {
    int rows = 0;
    int cols = 0;
    std::vector<std::uint8_t> pixels;
};

/// Reads the P5 files written by export_class_map (maxval 255, no comments).
inline GrayImage read_pgm(const std::filesystem::path& path) {
    auto r = io::ByteReader::from_file(path);
    r.expect_magic("P5");
    auto token = [&]() {
        std::string t;
        std::uint8_t ch = r.u8();
        while (ch == ' ' || ch == '\n' || ch == '\r' || ch == '\t') ch = r.u8();
        while (!(ch == ' ' || ch == '\n' || ch == '\r' || ch == '\t')) {
            t.push_back(static_cast<char>(ch));
            ch = r.u8();
        }
        return t;
    };
    GrayImage img;
    try {
        img.cols = std::stoi(token());
        img.rows = std::stoi(token());
        if (std::stoi(token()) != 255) throw FormatError("unsupported PGM maxval", r.offset());
    } catch (const std::logic_error&) {
        throw FormatError("malformed PGM header", r.offset());
    }
    if (img.rows < 0 || img.cols < 0) throw FormatError("negative PGM dimensions", r.offset());
    r.require_records(static_cast<std::uint64_t>(img.rows) * static_cast<std::uint64_t>(img.cols), 1, "PGM pixels");
    img.pixels.resize(static_cast<std::size_t>(img.rows) * img.cols);
    for (auto& p : img.pixels) p = r.u8();
    r.expect_end();
    return img;
}

/// Inverse of the gray-level mapping.
inline std::vector<std::size_t> class_grid_from_pixels(const GrayImage& img, std::size_t num_classes) {
    std::vector<std::size_t> out;
    out.reserve(img.pixels.size());
    for (std::uint8_t p : img.pixels) {
        out.push_back(static_cast<std::size_t>(std::lround(p * static_cast<double>(num_classes - 1) / 255.0)));
    }
    return out;
}

}  // namespace simd2nn
