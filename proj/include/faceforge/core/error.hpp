/*
 * faceforge - differentiable 3D head model fitting, detail displacement,
 * and scan-to-mesh evaluation.
 *
 * Copyright 2026 The faceforge authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <stdexcept>
#include <string>

namespace faceforge {

/// Base class for all faceforge errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Parameter or tensor dimensions do not match the bound model.
struct DimensionError : Error {
    explicit DimensionError(const std::string& msg) : Error(msg) {}
};

/// An invariant of a domain type is violated (weights not normalized,
/// out-of-range index, degenerate configuration, ...).
struct ValidationError : Error {
    explicit ValidationError(const std::string& msg) : Error(msg) {}
};

/// Errors while reading or writing artifact files.
struct IoError : Error {
    explicit IoError(const std::string& msg) : Error(msg) {}
};

/// Asset container declares an unsupported format version.
struct AssetVersionError : IoError {
    explicit AssetVersionError(const std::string& msg) : IoError(msg) {}
};

/// Asset chunk payload does not match its checksum or declared length.
struct AssetChecksumError : IoError {
    explicit AssetChecksumError(const std::string& msg) : IoError(msg) {}
};

} // namespace faceforge
