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

#include "faceforge/latent_code.hpp"

namespace faceforge {

/// JSON code files with raw arrays; doubles round-trip exactly (shortest
/// round-trip serialization).
void save_code(const LatentCode& code, const std::string& path);
LatentCode load_code(const std::string& path);

/// Plain-text landmarks: one "x y" pair per line, 68 lines.
Points2d read_landmarks_txt(const std::string& path);
void write_landmarks_txt(const Points2d& landmarks, const std::string& path);

/// Plain-text 3D points: one "x y z" per line (alignment correspondences).
PointMatrix read_points3_txt(const std::string& path);

} // namespace faceforge
