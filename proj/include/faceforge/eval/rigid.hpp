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

#include "faceforge/core/mesh.hpp"
#include "faceforge/core/types.hpp"

namespace faceforge {

/// Rigid (optionally scaled) transform p -> scale * R p + t.
struct RigidTransform {
    Mat3 rotation = Mat3::Identity();
    Vec3 translation = Vec3::Zero();
    double scale = 1.0;

    Vec3 apply(const Vec3& p) const { return scale * (rotation * p) + translation; }
    PointMatrix apply(const PointMatrix& points) const;
    RigidTransform compose(const RigidTransform& inner) const;
    void validate() const; // R orthonormal within 1e-9, det = +1
};

/**
 * Closed-form least-squares rigid fit mapping `source` landmarks onto
 * `target` landmarks (orthogonal Procrustes / Kabsch; Umeyama scale when
 * with_scale). Throws ValidationError for fewer than 3 or collinear points.
 */
RigidTransform rigid_align_landmarks(const PointMatrix& target, const PointMatrix& source,
                                     bool with_scale = false);

struct IcpOptions {
    int max_iterations = 50;
    double convergence = 1e-6; // RMS vertex movement per iteration, in mesh units
};

class MeshDistanceIndex; // eval/mesh_distance.hpp

/**
 * Point-to-plane ICP refinement of an initial transform: `points` (scan
 * vertices) stay fixed, the transform maps `mesh` onto them; each sweep
 * matches every scan vertex to its closest surface point and solves the
 * linearized 6-dof update.
 */
RigidTransform icp_refine(const PointMatrix& scan_points, const Mesh& mesh,
                          const RigidTransform& init, const IcpOptions& options = {});

} // namespace faceforge
