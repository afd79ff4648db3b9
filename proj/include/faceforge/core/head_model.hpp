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
#include <utility>
#include <vector>

#include "faceforge/core/mesh.hpp"
#include "faceforge/core/types.hpp"

namespace faceforge {

/**
 * Statistical head model: a template mesh deformed by linear identity and
 * expression blendshapes plus rotation-driven pose correctives, then posed
 * by linear blend skinning over a small kinematic chain.
 *
 * Pose parameters are laid out as [global(3), joint_0(3), ..., joint_{k-1}(3)],
 * each block an axis-angle rotation in radians. The global rotation acts
 * about the root joint. Immutable after load; all queries are pure.
 */
struct ParametricHeadModel {
    PointMatrix template_vertices; // n x 3
    TriangleMatrix triangles;      // m x 3
    MatX shape_basis;              // 3n x |beta|, vertex-major rows (x0 y0 z0 x1 ...)
    MatX expression_basis;         // 3n x |psi|
    MatX pose_corrective_basis;    // 3n x 9k
    MatX skinning_weights;         // k x n, columns sum to 1
    MatX joint_regressor;          // k x n, joints = regressor * shaped vertices
    std::vector<int> kinematic_parents; // per joint, root = -1
    std::vector<std::string> joint_names;
    int jaw_joint = -1;
    std::vector<SurfaceAnchor> landmark_embedding; // 68 anchors
    UvMatrix uv_coords;                            // n x 2 in [0,1]^2
    std::vector<std::pair<int, int>> eyelid_pairs; // (upper, lower) landmark ids

    int vertex_count() const { return static_cast<int>(template_vertices.rows()); }
    int triangle_count() const { return static_cast<int>(triangles.rows()); }
    int joint_count() const { return static_cast<int>(skinning_weights.rows()); }
    int shape_dim() const { return static_cast<int>(shape_basis.cols()); }
    int expression_dim() const { return static_cast<int>(expression_basis.cols()); }
    int pose_dim() const { return 3 * joint_count() + 3; }

    /// Checks every structural invariant; throws ValidationError on failure.
    void validate() const;
};

/// Joint positions regressed from the identity-shaped (pre-posed) vertices.
MatX joint_locations(const ParametricHeadModel& model, const VecX& beta);

/// Rotation-driven corrective offsets: basis * (vec(R(theta_j)) - vec(I))
/// stacked over the k joints (the global rotation does not contribute).
PointMatrix pose_correctives(const ParametricHeadModel& model, const VecX& theta);

/// Feature vector of the correctives (9k rotation-matrix residuals).
VecX pose_feature(const ParametricHeadModel& model, const VecX& theta);

/// Linear blend skinning of `vertices` around `joints` with per-joint
/// axis-angle rotations from theta. Throws ValidationError if weight
/// columns do not sum to 1 (tolerance 1e-6).
PointMatrix blend_skinning(const PointMatrix& vertices, const MatX& joints,
                           const VecX& theta, const MatX& weights,
                           const std::vector<int>& parents);

// Rest-pose-relative rigid transforms per joint. Composed so that every
// transform is exactly the identity at theta = 0 (no accumulated rounding),
// which keeps decode_geometry(0, 0, 0) equal to the template.
struct PoseTransforms {
    std::vector<Mat3> local_rot; // k joint rotations R(theta_j)
    Mat3 global_rot;
    std::vector<Mat3> skin_rot; // applied to rest vertices: v' = R v + t
    std::vector<Vec3> skin_t;
};

struct GeometryCache {
    VecX beta, theta, psi;
    PointMatrix shaped;     // T + B_S(beta)
    PointMatrix posed_rest; // shaped + B_E(psi) + B_P(theta)
    MatX joints;            // k x 3
    PoseTransforms pose;
};

/// Full geometry decode: skinning of (template + shape + expression + pose
/// correctives) around regressed joints. Deterministic; optional cache
/// enables the backward pass.
Mesh decode_geometry(const ParametricHeadModel& model, const VecX& beta,
                     const VecX& theta, const VecX& psi,
                     GeometryCache* cache = nullptr);

struct GeometryGrads {
    VecX beta, theta, psi;
};

/// Reverse-mode pullback of a vertex-position gradient onto (beta, theta, psi).
GeometryGrads decode_geometry_backward(const ParametricHeadModel& model,
                                       const GeometryCache& cache,
                                       const PointMatrix& grad_vertices);

} // namespace faceforge
