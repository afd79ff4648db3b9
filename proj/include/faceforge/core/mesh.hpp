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

#include <vector>

#include "faceforge/core/types.hpp"

namespace faceforge {

struct Mesh {
    PointMatrix vertices;    // n x 3
    TriangleMatrix triangles; // m x 3
    UvMatrix uv;             // n x 2, empty if absent
    PointMatrix normals;     // n x 3 unit vectors, empty if absent

    int vertex_count() const { return static_cast<int>(vertices.rows()); }
    int triangle_count() const { return static_cast<int>(triangles.rows()); }
    bool has_uv() const { return uv.rows() == vertices.rows(); }
    bool has_normals() const { return normals.rows() == vertices.rows(); }
};

/// One surface point expressed as barycentric coordinates on a triangle.
struct SurfaceAnchor {
    int triangle = 0;
    Vec3 barycentric = Vec3(1.0, 0.0, 0.0);
};

// Faces with twice-area below this threshold are skipped when accumulating
// vertex normals (and in the matching backward pass).
inline constexpr double kDegenerateAreaEps = 1e-12;

struct VertexNormalsCache {
    PointMatrix accum;           // pre-normalization area-weighted sums
    std::vector<char> face_used; // 0 for degenerate faces
};

/// Area-weighted average of incident face normals, normalized to unit
/// length. Throws ValidationError if a vertex has no non-degenerate
/// incident face (isolated vertex).
PointMatrix vertex_normals(const PointMatrix& vertices, const TriangleMatrix& triangles,
                           VertexNormalsCache* cache = nullptr);

/// Pullback of a per-vertex normal gradient onto the vertex positions.
PointMatrix vertex_normals_backward(const PointMatrix& vertices,
                                    const TriangleMatrix& triangles,
                                    const VertexNormalsCache& cache,
                                    const PointMatrix& grad_normals);

/// Barycentric interpolation of anchor points on the mesh surface.
PointMatrix surface_landmarks(const Mesh& mesh, const std::vector<SurfaceAnchor>& anchors);

/// Pullback of landmark-position gradients onto mesh vertices.
PointMatrix surface_landmarks_backward(const Mesh& mesh,
                                       const std::vector<SurfaceAnchor>& anchors,
                                       const PointMatrix& grad_landmarks);

} // namespace faceforge
