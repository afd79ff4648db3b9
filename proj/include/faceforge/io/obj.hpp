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

#include "faceforge/core/mesh.hpp"

namespace faceforge {

/// Writes v/vt/vn/f records with full double precision; faces reference the
/// same index for position, texture and normal (one attribute per vertex).
void write_obj(const Mesh& mesh, const std::string& path);

/// Reads an OBJ (v, vt, vn, f with optional /-separated indices). Polygons
/// are fan-triangulated; per-face-corner vt/vn indices must agree with the
/// vertex index, matching what write_obj emits.
Mesh read_obj(const std::string& path);

} // namespace faceforge
