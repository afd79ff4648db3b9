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

#include "faceforge/render/image.hpp"

namespace faceforge {

/// Writes a 1- or 3-channel map as little-endian 32-bit float PFM
/// (bottom-up row order, scale -1.0). Values are converted to float.
void write_pfm(const Image& image, const std::string& path);

/// Reads a PFM file into a double image (1 or 3 channels).
Image read_pfm(const std::string& path);

} // namespace faceforge
