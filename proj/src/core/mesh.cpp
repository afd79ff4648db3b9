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
#include "faceforge/core/mesh.hpp"

#include <string>

#include "faceforge/core/error.hpp"

namespace faceforge {

PointMatrix vertex_normals(const PointMatrix& vertices, const TriangleMatrix& triangles,
                           VertexNormalsCache* cache) {
    const Eigen::Index n = vertices.rows();
    const Eigen::Index m = triangles.rows();
    PointMatrix accum = PointMatrix::Zero(n, 3);
    std::vector<char> face_used(static_cast<std::size_t>(m), 1);

    for (Eigen::Index f = 0; f < m; ++f) {
        const int i0 = triangles(f, 0);
        const int i1 = triangles(f, 1);
        const int i2 = triangles(f, 2);
        const Vec3 a = vertices.row(i1) - vertices.row(i0);
        const Vec3 b = vertices.row(i2) - vertices.row(i0);
        const Vec3 c = a.cross(b); // |c| = 2 * area, direction = face normal
        if (c.norm() < kDegenerateAreaEps) {
            face_used[static_cast<std::size_t>(f)] = 0;
            continue;
        }
        accum.row(i0) += c;
        accum.row(i1) += c;
        accum.row(i2) += c;
    }

    PointMatrix normals(n, 3);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double len = accum.row(i).norm();
        if (len < kDegenerateAreaEps) {
            throw ValidationError("vertex_normals: vertex " + std::to_string(i) +
                                  " has no non-degenerate incident face");
        }
        normals.row(i) = accum.row(i) / len;
    }
    if (cache != nullptr) {
        cache->accum = std::move(accum);
        cache->face_used = std::move(face_used);
    }
    return normals;
}

PointMatrix vertex_normals_backward(const PointMatrix& vertices,
                                    const TriangleMatrix& triangles,
                                    const VertexNormalsCache& cache,
                                    const PointMatrix& grad_normals) {
    const Eigen::Index n = vertices.rows();
    const Eigen::Index m = triangles.rows();

    // n = m/|m|   =>   grad_m = (I - n n^T) / |m| * grad_n
    PointMatrix grad_accum(n, 3);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Vec3 mvec = cache.accum.row(i);
        const double len = mvec.norm();
        const Vec3 nn = mvec / len;
        const Vec3 g = grad_normals.row(i);
        grad_accum.row(i) = (g - nn * nn.dot(g)) / len;
    }

    PointMatrix grad_vertices = PointMatrix::Zero(n, 3);
    for (Eigen::Index f = 0; f < m; ++f) {
        if (!cache.face_used[static_cast<std::size_t>(f)]) {
            continue;
        }
        const int i0 = triangles(f, 0);
        const int i1 = triangles(f, 1);
        const int i2 = triangles(f, 2);
        const Vec3 a = vertices.row(i1) - vertices.row(i0);
        const Vec3 b = vertices.row(i2) - vertices.row(i0);
        const Vec3 gc = Vec3(grad_accum.row(i0)) + Vec3(grad_accum.row(i1)) +
                        Vec3(grad_accum.row(i2));
        // c = a x b  =>  grad_a = b x gc, grad_b = gc x a
        const Vec3 ga = b.cross(gc);
        const Vec3 gb = gc.cross(a);
        grad_vertices.row(i1) += ga;
        grad_vertices.row(i2) += gb;
        grad_vertices.row(i0) -= ga + gb;
    }
    return grad_vertices;
}

PointMatrix surface_landmarks(const Mesh& mesh, const std::vector<SurfaceAnchor>& anchors) {
    PointMatrix points(static_cast<Eigen::Index>(anchors.size()), 3);
    for (std::size_t a = 0; a < anchors.size(); ++a) {
        const SurfaceAnchor& anchor = anchors[a];
        if (anchor.triangle < 0 || anchor.triangle >= mesh.triangle_count()) {
            throw ValidationError("surface_landmarks: triangle index out of range: " +
                                  std::to_string(anchor.triangle));
        }
        Vec3 p = Vec3::Zero();
        for (int c = 0; c < 3; ++c) {
            p += anchor.barycentric[c] * Vec3(mesh.vertices.row(mesh.triangles(anchor.triangle, c)));
        }
        points.row(static_cast<Eigen::Index>(a)) = p;
    }
    return points;
}

PointMatrix surface_landmarks_backward(const Mesh& mesh,
                                       const std::vector<SurfaceAnchor>& anchors,
                                       const PointMatrix& grad_landmarks) {
    PointMatrix grad_vertices = PointMatrix::Zero(mesh.vertices.rows(), 3);
    for (std::size_t a = 0; a < anchors.size(); ++a) {
        const SurfaceAnchor& anchor = anchors[a];
        for (int c = 0; c < 3; ++c) {
            grad_vertices.row(mesh.triangles(anchor.triangle, c)) +=
                anchor.barycentric[c] * grad_landmarks.row(static_cast<Eigen::Index>(a));
        }
    }
    return grad_vertices;
}

} // namespace faceforge
