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

#include "faceforge/core/types.hpp"

namespace faceforge {

/// Closest point to p on triangle (a, b, c), handling interior, edge and
/// vertex regions exactly. Optionally reports the barycentric coordinates
/// of the closest point.
Vec3 closest_point_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c,
                            Vec3* barycentric = nullptr);

} // namespace faceforge
