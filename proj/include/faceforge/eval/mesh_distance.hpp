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

#include "faceforge/core/mesh.hpp"

namespace faceforge {

/**
 * Static axis-aligned bounding-box tree over mesh triangles for exact
 * closest-point queries (interior/edge/vertex cases). Immutable after
 * construction; queries are lock-free and may run concurrently.
 */
class MeshDistanceIndex {
public:
    explicit MeshDistanceIndex(const Mesh& mesh);

    struct ClosestHit {
        double distance = 0.0;
        int triangle = -1;
        Vec3 point = Vec3::Zero();
    };

    ClosestHit closest(const Vec3& query) const;
    const Mesh& mesh() const { return mesh_; }

private:
    struct Node {
        Vec3 lower, upper;
        int left = -1, right = -1; // children, or leaf range when left < 0
        int begin = 0, end = 0;    // triangle index range for leaves
    };

    int build(int begin, int end);
    void visit(const Vec3& query, int node, ClosestHit* best) const;

    Mesh mesh_;
    std::vector<int> order_;       // triangle indices, partitioned per node
    std::vector<Vec3> centroids_;
    std::vector<Node> nodes_;
};

/// Per-scan-vertex distance to the closest point on the mesh surface.
VecX scan_to_mesh_distance(const PointMatrix& scan_vertices, const Mesh& mesh);

/// Brute-force reference: minimum over all triangles, no acceleration.
VecX scan_to_mesh_distance_bruteforce(const PointMatrix& scan_vertices, const Mesh& mesh);

} // namespace faceforge
