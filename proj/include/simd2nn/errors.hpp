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

#include <cstdint>
#include <stdexcept>
#include <string>

namespace simd2nn {

/// Base of every error the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration values.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Vector or matrix dimensions that do not agree.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Arguments outside the mathematical domain of a formula.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Layer or atom index out of range.
class BoundsError : public Error {
public:
    using Error::Error;
};

/// Input-layer encoding contract violated (|s| > 1).
class EncodingError : public Error {
public:
    using Error::Error;
};

/// Patch labeling requested without a label mask.
class LabelingError : public Error {
public:
    using Error::Error;
};

/// All-zero feature vector; carries no wavefield.
class DegeneratePatchError : public Error {
public:
    using Error::Error;
};

/// Malformed binary file. `offset` is the byte position where decoding failed.
class FormatError : public Error {
public:
    FormatError(const std::string& what, std::uint64_t offset)
        : Error(what + " (at byte offset " + std::to_string(offset) + ")"), offset_(offset) {}

    std::uint64_t offset() const noexcept { return offset_; }

private:
    std::uint64_t offset_;
};

}  // namespace simd2nn
