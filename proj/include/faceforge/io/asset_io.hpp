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

#include <string>

#include "faceforge/core/head_model.hpp"
#include "faceforge/render/albedo.hpp"

namespace faceforge {

struct ModelAssets {
    ParametricHeadModel head;
    AlbedoModel albedo;
};

/**
 * Model asset storage. Two layouts share one manifest schema:
 *  - directory: manifest.json plus blobs/<tensor>.bin raw files;
 *  - single file (path ending in .ffa): chunk container with per-chunk CRC32.
 * Tensors are little-endian float32 (indices int32), row-major.
 *
 * Loading checks the declared format version, every blob length and
 * checksum, and all model invariants; the error types are distinct
 * (AssetVersionError, AssetChecksumError, ValidationError).
 */
void save_model(const std::string& path, const ParametricHeadModel& head,
                const AlbedoModel& albedo);

ModelAssets load_model(const std::string& path);

} // namespace faceforge
