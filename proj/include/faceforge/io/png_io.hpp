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

/// Writes an image as 8-bit PNG; values are clamped from [lo, hi] to
/// [0, 255] linearly (default [0, 1]).
void write_png8(const Image& image, const std::string& path, double lo = 0.0,
                double hi = 1.0);

/// Writes a 1-channel map as 16-bit grayscale PNG with linear [lo, hi] ->
/// [0, 65535] scaling. The documented displacement mapping uses
/// lo = -0.01, hi = 0.01 and is lossy.
void write_png16(const Image& image, const std::string& path, double lo, double hi);

/// Reads an 8- or 16-bit PNG into doubles scaled to [0, 1] (alpha dropped,
/// palette expanded). Gray stays 1-channel, color becomes 3.
Image read_png(const std::string& path);

} // namespace faceforge
