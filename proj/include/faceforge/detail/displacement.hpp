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

#include <cstdint>
#include <vector>

#include "faceforge/core/mesh.hpp"
#include "faceforge/render/image.hpp"

namespace faceforge {

/// M' = M + D (Hadamard) N per texel inside the mask; identity outside.
Image apply_displacement(const Image& position_uv, const Image& normal_uv,
                         const Image& displacement, const std::vector<uint8_t>& mask);

/// Pullback of an M' gradient onto the displacement map (positions and
/// normals are held fixed; the coarse stage is frozen here).
Image apply_displacement_backward(const Image& normal_uv, const std::vector<uint8_t>& mask,
                                  const Image& grad_mprime);

struct FdNormals {
    Image normals;
    int degenerate_count = 0; // texels that fell back to the fallback normal
};

/**
 * Per-texel surface normals of a UV position map: normalized cross product
 * of the central-difference tangents along u and v, one-sided at mask
 * boundaries. Texels with degenerate tangents (or outside the mask) take
 * the fallback normal and are counted.
 */
FdNormals fd_normals(const Image& position_uv, const std::vector<uint8_t>& mask,
                     const Image& fallback_normals);

/// Pullback of a normal-map gradient onto the position map.
Image fd_normals_backward(const Image& position_uv, const std::vector<uint8_t>& mask,
                          const Image& grad_normals);

/**
 * Rotates the smooth shading normal at each texel by the shortest-arc
 * rotation between the coarse and displaced finite-difference normals.
 * Exactly the smooth normal where the two agree (in particular for zero
 * displacement), so the detail render degrades to the coarse render.
 */
Image transfer_normals(const Image& coarse_fd, const Image& detail_fd,
                       const Image& smooth_normals, const std::vector<uint8_t>& mask);

/// Pullback of a transferred-normal gradient onto the displaced
/// finite-difference normals (coarse inputs held fixed).
Image transfer_normals_backward(const Image& coarse_fd, const Image& detail_fd,
                                const Image& smooth_normals,
                                const std::vector<uint8_t>& mask, const Image& grad_out);

/// Vertex-level detail export: displacement sampled bilinearly at each
/// vertex UV, applied along the vertex normal.
Mesh displaced_mesh(const Mesh& mesh, const Image& displacement);

} // namespace faceforge
